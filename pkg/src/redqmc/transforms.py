"""
Componentwise maps applied to reduced columns.

A map applied elementwise to column ``j`` commutes with tiling, so the fast
products keep their cost when the points are shifted modulo one,
tent-transformed, or pushed through the normal quantile function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import InvalidParameterError, NumericDomainError

__all__ = [
    "ComponentTransform",
    "shift_mod1",
    "tent",
    "normal_quantile",
    "apply_to_column",
    "shifted_product",
    "transformed_product",
    "random_shifts",
]

_KINDS = ("identity", "tent", "normal")


def shift_mod1(x, delta: float):
    """``{x + delta}``."""
    y = np.asarray(x, dtype=float) + delta
    return y - np.floor(y)


def tent(x):
    """Tent map ``1 - |1 - 2x|``."""
    return 1.0 - np.abs(1.0 - 2.0 * np.asarray(x, dtype=float))


def normal_quantile(u):
    """Inverse standard normal CDF for ``u`` in (0, 1)."""
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    if np.any(~(u > 0.0)) or np.any(~(u < 1.0)):
        raise NumericDomainError("normal quantile needs 0 < u < 1")
    out = ndtri(u)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class ComponentTransform:
    """Shift modulo one followed by an optional map.

    ``kind`` is ``"identity"``, ``"tent"`` or ``"normal"``; ``shift`` is in
    [0, 1). A pure shift is ``ComponentTransform("identity", delta)``.
    """

    kind: str = "identity"
    shift: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidParameterError(
                f"unknown transform {self.kind!r}, expected one of {_KINDS}")
        if not 0.0 <= self.shift < 1.0:
            raise InvalidParameterError(f"shift must be in [0, 1), got {self.shift}")

    @property
    def is_identity(self) -> bool:
        return self.kind == "identity" and self.shift == 0.0

    def apply(self, x, zero_remap: float | None = None):
        """Map an array of values in [0, 1).

        For ``kind="normal"`` a value that is exactly 0 after the shift is
        replaced by ``zero_remap``; without one it is a domain error.
        """
        y = np.asarray(x, dtype=float)
        if self.shift:
            y = shift_mod1(y, self.shift)
        if self.kind == "tent":
            return tent(y)
        if self.kind == "normal":
            if np.any(y == 0.0):
                if zero_remap is None:
                    raise NumericDomainError(
                        "normal quantile of 0; shift the points or pass zero_remap")
                y = np.where(y == 0.0, zero_remap, y)
            return normal_quantile(y)
        return y

    __call__ = apply


def apply_to_column(column, t: ComponentTransform, zero_remap: float | None = None):
    """Elementwise ``t`` on a reduced column; tiling the result equals
    transforming the tiled column."""
    return t.apply(column, zero_remap=zero_remap)


def random_shifts(s: int, seed: int) -> np.ndarray:
    """``s`` uniform shifts in [0, 1) from a seeded generator."""
    return np.random.default_rng(seed).random(s)


def transformed_product(plan, transforms, algo: str = "alg1") -> np.ndarray:
    """Product of the transformed lattice with ``plan.A``.

    ``algo`` is ``"alg1"``, ``"alg2"`` or ``"naive"``.
    """
    from . import fastprod
    from .pointset import full_point_set

    transforms = list(transforms)
    if algo == "alg1":
        return fastprod.fast_reduced_product(plan, transforms)
    if algo == "alg2":
        return fastprod.optimized_fast_reduced_product(plan, transforms=transforms)
    if algo == "naive":
        g = plan.g
        if len(transforms) != g.s:
            raise InvalidParameterError(f"expected {g.s} transforms")
        X = full_point_set(g)
        zero_remap = 0.5 * float(g.b)**-g.m
        for j, t in enumerate(transforms):
            X[:, j] = t.apply(X[:, j], zero_remap=zero_remap)
        out = fastprod.naive_product(X, plan.A, plan.counter)
        plan.last_algo = "naive"
        return out
    raise InvalidParameterError(f"unknown algorithm {algo!r}")


def shifted_product(plan, shifts, algo: str = "alg1") -> np.ndarray:
    """``{X + Delta} A`` with one shift per coordinate."""
    shifts = np.asarray(shifts, dtype=float)
    if shifts.shape != (plan.g.s,):
        raise InvalidParameterError(
            f"need one shift per coordinate ({plan.g.s}), got shape {shifts.shape}")
    return transformed_product(
        plan, [ComponentTransform("identity", float(d)) for d in shifts], algo)
