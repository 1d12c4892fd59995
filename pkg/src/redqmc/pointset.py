"""
Reduced rank-1 lattice point sets.

A reduced lattice with ``N = b**m`` points is generated by the vector
``(b**w_1 * z_1, ..., b**w_s * z_s)`` where ``0 = w_1 <= w_2 <= ...`` are the
reduction indices and ``z_j`` is a unit modulo ``b**(m - w_j)``. Coordinate
``j`` then only takes ``b**(m - min(w_j, m))`` distinct values, each one
repeated ``b**min(w_j, m)`` times, and the full column is the reduced column
tiled end to end.

Coordinates are numbered from 1 in docstrings and error messages and from 0
in arrays.

Coordinates are kept as exact integer numerators over a power of ``b``
until they are handed out as floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapExceededError, InvalidParameterError

__all__ = [
    "MATERIALIZE_CAP",
    "ReductionIndices",
    "ReducedGeneratingVector",
    "is_prime",
    "unit_group",
    "reduced_numerators",
    "reduced_column",
    "full_point_numerators",
    "full_point_set",
    "random_generating_vector",
    "log_reduction_indices",
]

#: Largest ``N * s`` the materializing (oracle) paths will allocate.
MATERIALIZE_CAP = 2**26


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    return all(n % p for p in range(3, math.isqrt(n) + 1, 2))


def _check_base(b):
    if not isinstance(b, (int, np.integer)) or not is_prime(int(b)):
        raise InvalidParameterError(f"base b must be a prime, got {b!r}")


@dataclass(frozen=True)
class ReductionIndices:
    """Nondecreasing reduction indices ``w`` for ``N = b**m`` points.

    Parameters
    ----------
    b : int
        Prime base.
    m : int
        Exponent, ``N = b**m``.
    w : sequence of int
        Reduction indices, ``w[0] == 0`` and nondecreasing. Values larger
        than ``m`` are allowed; they behave like ``m``.
    """

    b: int
    m: int
    w: tuple[int, ...]

    def __post_init__(self):
        _check_base(self.b)
        if int(self.m) < 1:
            raise InvalidParameterError(f"m must be >= 1, got {self.m}")
        w = tuple(int(v) for v in self.w)
        if not w:
            raise InvalidParameterError("need at least one coordinate")
        if w[0] != 0:
            raise InvalidParameterError("first reduction index must be 0",
                                        index=1)
        for j in range(1, len(w)):
            if w[j] < w[j - 1]:
                raise InvalidParameterError(
                    "reduction indices must be nondecreasing", index=j + 1)
        object.__setattr__(self, "b", int(self.b))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "w", w)

    @property
    def s(self) -> int:
        return len(self.w)

    @property
    def N(self) -> int:
        return self.b**self.m

    @property
    def s_star(self) -> int:
        """Number of coordinates with ``w_j < m`` (the rest are all zero)."""
        return sum(1 for v in self.w if v < self.m)

    def size(self, j: int) -> int:
        """Number of distinct values ``b**(m - min(w_j, m))`` of coordinate
        ``j`` (0-based)."""
        return self.b**(self.m - min(self.w[j], self.m))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(self.size(j) for j in range(self.s))

    def multiplicity(self, j: int) -> int:
        return self.b**min(self.w[j], self.m)

    def truncated(self, d: int) -> "ReductionIndices":
        return ReductionIndices(self.b, self.m, self.w[:d])


def unit_group(b: int, m: int, w: int) -> list[int]:
    """Units modulo ``b**(m - w)`` in ascending order, or ``[1]`` if
    ``w >= m``.

    >>> unit_group(2, 3, 0)
    [1, 3, 5, 7]
    """
    _check_base(b)
    if m < 1 or w < 0:
        raise InvalidParameterError(f"need m >= 1 and w >= 0, got m={m}, w={w}")
    if w >= m:
        return [1]
    n = b**(m - w)
    # gcd(z, b) == 1 for prime b means b does not divide z
    return [z for z in range(1, n) if z % b]


@dataclass(frozen=True)
class ReducedGeneratingVector:
    """Per-coordinate units ``z_j`` together with their reduction indices."""

    indices: ReductionIndices
    z: tuple[int, ...]

    def __post_init__(self):
        z = tuple(int(v) for v in self.z)
        ind = self.indices
        if len(z) != ind.s:
            raise InvalidParameterError(
                f"expected {ind.s} components, got {len(z)}")
        for j, (zj, wj) in enumerate(zip(z, ind.w)):
            if wj >= ind.m:
                if zj != 1:
                    raise InvalidParameterError(
                        "z_j must be 1 when w_j >= m", index=j + 1)
                continue
            n = ind.size(j)
            if not (1 <= zj < n) or zj % ind.b == 0:
                raise InvalidParameterError(
                    f"z_j={zj} is not a unit modulo {n}", index=j + 1)
        object.__setattr__(self, "z", z)

    @classmethod
    def from_components(cls, indices: ReductionIndices, z: Sequence[int],
                        reduce: bool = True) -> "ReducedGeneratingVector":
        """Build from raw integers, reducing ``z_j`` modulo ``b**(m-w_j)``
        first when ``reduce`` is true."""
        if reduce:
            z = [int(zj) % indices.size(j) if indices.w[j] < indices.m else 1
                 for j, zj in enumerate(z)]
        return cls(indices, tuple(z))

    @property
    def b(self) -> int:
        return self.indices.b

    @property
    def m(self) -> int:
        return self.indices.m

    @property
    def s(self) -> int:
        return self.indices.s

    @property
    def N(self) -> int:
        return self.indices.N

    def lattice_vector(self) -> np.ndarray:
        """Full generating vector ``b**w_j * z_j`` reduced modulo ``N``."""
        ind = self.indices
        return np.array([(ind.b**min(wj, ind.m) * zj) % ind.N
                         for wj, zj in zip(ind.w, self.z)], dtype=np.int64)

    def truncated(self, d: int) -> "ReducedGeneratingVector":
        return ReducedGeneratingVector(self.indices.truncated(d), self.z[:d])


def reduced_numerators(g: ReducedGeneratingVector, j: int) -> np.ndarray:
    """Integer numerators ``k * z_j mod n_j`` for ``k < n_j`` (0-based ``j``)."""
    if not 0 <= j < g.s:
        raise IndexError(f"coordinate {j} out of range for s={g.s}")
    n = g.indices.size(j)
    return (np.arange(n, dtype=np.int64) * g.z[j]) % n


def reduced_column(g: ReducedGeneratingVector, j: int) -> np.ndarray:
    """Distinct values of coordinate ``j`` (0-based) in lattice order.

    Entry ``k`` equals ``(k * z_j mod n_j) / n_j`` with
    ``n_j = b**(m - min(w_j, m))``. The full length-``N`` column is this
    vector repeated ``N / n_j`` times.

    >>> from redqmc.pointset import ReductionIndices, ReducedGeneratingVector
    >>> g = ReducedGeneratingVector(ReductionIndices(2, 3, (0, 1)), (1, 3))
    >>> reduced_column(g, 1)
    array([0.  , 0.75, 0.5 , 0.25])
    """
    n = g.indices.size(j)
    return reduced_numerators(g, j) / n


def _check_cap(rows, cols, cap):
    if rows * cols > cap:
        raise CapExceededError(
            f"refusing to materialize {rows} x {cols} entries (cap {cap})")


def full_point_numerators(g: ReducedGeneratingVector,
                          cap: int = MATERIALIZE_CAP):
    """Exact form of :func:`full_point_set`.

    Returns
    -------
    num : ndarray of int64, shape (N, s)
    den : ndarray of int64, shape (s,)
        Point ``k`` coordinate ``j`` is ``num[k, j] / den[j]``.
    """
    N, s = g.N, g.s
    _check_cap(N, s, cap)
    den = np.array(g.indices.sizes, dtype=np.int64)
    k = np.arange(N, dtype=np.int64)[:, None]
    z = np.array(g.z, dtype=np.int64)[None, :]
    return (k * z) % den[None, :], den


def full_point_set(g: ReducedGeneratingVector,
                   cap: int = MATERIALIZE_CAP) -> np.ndarray:
    """All ``N`` points of the reduced lattice as an ``(N, s)`` array."""
    num, den = full_point_numerators(g, cap)
    return num / den[None, :]


def random_generating_vector(indices: ReductionIndices,
                             rng=None) -> ReducedGeneratingVector:
    """Generating vector with each ``z_j`` drawn uniformly from its unit
    group. Used for tests and benchmarks where the quality of ``z`` does
    not matter."""
    rng = np.random.default_rng(rng)
    b = indices.b
    z = []
    for j, wj in enumerate(indices.w):
        if wj >= indices.m:
            z.append(1)
            continue
        n = indices.size(j)
        # units mod b**e are exactly the residues not divisible by b
        q = int(rng.integers(0, n - n // b))
        z.append(q + q // (b - 1) + 1)
    return ReducedGeneratingVector(indices, tuple(z))


def log_reduction_indices(b: int, m: int, s: int, c: float) -> ReductionIndices:
    """``w_j = min(floor(log_b(j**c)), m)`` for ``j = 1..s``.

    ``c = 0`` gives all zeros. A relative slack of 1e-12 keeps exact powers
    of ``b`` (``j**c = b**e``) from rounding down.
    """
    if s < 1:
        raise InvalidParameterError(f"s must be >= 1, got {s}")
    if not c >= 0:
        raise InvalidParameterError(f"exponent c must be >= 0, got {c}")
    lb = math.log(b)
    w = tuple(min(int(math.floor(c * math.log(j) / lb + 1e-12)), m)
              for j in range(1, s + 1))
    return ReductionIndices(b, m, w)
