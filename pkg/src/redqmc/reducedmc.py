"""
Reduced Monte Carlo.

Coordinate ``j`` draws only ``N_j = b**(m - w_j)`` i.i.d. samples, and point
``n`` uses sample ``n mod N_j`` of it. Writing
``n = m_s N_{s+1} + m_{s-1} N_s + ... + m_1 N_2`` with digits
``0 <= m_j < M_j = N_j / N_{j+1}`` (``N_{s+1} = 1``), the index ``n mod N_j``
keeps the digits ``m_j .. m_s``. Products ``X A`` therefore have the same
nested tiling as reduced lattices and cost ``tau * sum_j N_j``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import (CapExceededError, DimensionMismatchError,
                     InvalidParameterError, MissingEntryError)
from .fastprod import OpCounter, descending_tiled_product
from .pointset import MATERIALIZE_CAP, ReductionIndices

__all__ = [
    "ReducedMCLayout",
    "SampleBank",
    "SampleMatrix",
    "DISTRIBUTIONS",
    "draw_bank",
    "mixed_radix_decompose",
    "mixed_radix_compose",
    "sample_matrix",
    "reduced_mc_product",
    "reduced_mc_estimate",
    "tail_set",
    "variance_formula",
    "mu_tail_exact",
    "pairwise_variance",
    "enumerate_variance",
]

DISTRIBUTIONS = ("uniform", "normal", "bernoulli")


@dataclass(frozen=True)
class ReducedMCLayout:
    """Sample counts ``N_j`` and radices ``M_j`` derived from ``indices``."""

    indices: ReductionIndices

    @property
    def s(self) -> int:
        return self.indices.s

    @property
    def N(self) -> int:
        return self.indices.N

    @property
    def sizes(self) -> tuple[int, ...]:
        """``N_1, ..., N_s``."""
        return self.indices.sizes

    @property
    def radices(self) -> tuple[int, ...]:
        """``M_1, ..., M_s`` with ``M_s = N_s``."""
        n = self.sizes + (1,)
        return tuple(n[j] // n[j + 1] for j in range(self.s))


def mixed_radix_decompose(n: int, layout: ReducedMCLayout) -> tuple[int, ...]:
    """Digits ``(m_1, ..., m_s)`` of ``n``; ``m_s`` is the least
    significant."""
    if not 0 <= n < layout.N:
        raise InvalidParameterError(f"index {n} outside 0..{layout.N - 1}")
    digits = []
    for M in reversed(layout.radices):
        n, d = divmod(n, M)
        digits.append(d)
    return tuple(reversed(digits))


def mixed_radix_compose(digits: Sequence[int], layout: ReducedMCLayout) -> int:
    """Inverse of :func:`mixed_radix_decompose`."""
    if len(digits) != layout.s:
        raise DimensionMismatchError(f"expected {layout.s} digits, got {len(digits)}")
    n = 0
    for j, (d, M) in enumerate(zip(digits, layout.radices)):
        if not 0 <= d < M:
            raise InvalidParameterError(f"digit {d} outside 0..{M - 1}", index=j + 1)
        n = n * M + d
    return n


@dataclass(frozen=True, eq=False)
class SampleBank:
    """Per-coordinate sample vectors.

    ``streams[j]`` is ``(stream, start, stop)``: coordinate ``j`` holds the
    draws at positions ``start..stop-1`` of its own random stream.
    """

    samples: tuple[np.ndarray, ...]
    dist: str
    seed: int | None
    streams: tuple[tuple[int, int, int], ...]

    def conforms(self, layout: ReducedMCLayout) -> bool:
        return tuple(len(y) for y in self.samples) == layout.sizes


def _draw(rng, dist, n, p):
    if dist == "uniform":
        return rng.random(n)
    if dist == "normal":
        return rng.standard_normal(n)
    if dist == "bernoulli":
        return (rng.random(n) < p).astype(float)
    raise InvalidParameterError(f"unknown distribution {dist!r}, expected one of {DISTRIBUTIONS}")


def draw_bank(layout: ReducedMCLayout, dist: str = "uniform", seed: int | None = None,
              p: float = 0.5) -> SampleBank:
    """Draw ``N_j`` samples for each coordinate.

    Coordinate ``j`` uses stream ``j`` spawned from ``seed``, each a Philox
    counter-based generator, so coordinates are independent and a bank is
    reproducible from ``(seed, layout)``.
    """
    if dist == "bernoulli" and not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"Bernoulli parameter must be in [0, 1], got {p}")
    children = np.random.SeedSequence(seed).spawn(layout.s)
    samples, streams = [], []
    for j, (child, n) in enumerate(zip(children, layout.sizes)):
        rng = np.random.Generator(np.random.Philox(child))
        samples.append(_draw(rng, dist, n, p))
        streams.append((j, 0, n))
    return SampleBank(tuple(samples), dist, seed, tuple(streams))


class SampleMatrix:
    """Read-only ``N x s`` view of a bank; rows are built on demand."""

    def __init__(self, bank: SampleBank, layout: ReducedMCLayout):
        if not bank.conforms(layout):
            raise DimensionMismatchError(
                f"bank sizes {[len(y) for y in bank.samples]} do not match {layout.sizes}")
        self.bank = bank
        self.layout = layout
        self._sizes = np.array(layout.sizes, dtype=np.int64)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.layout.N, self.layout.s)

    def bank_indices(self, n) -> np.ndarray:
        """Bank positions ``n mod N_j`` used by row(s) ``n``."""
        n = np.asarray(n, dtype=np.int64)
        return n[..., None] % self._sizes

    def rows(self, n) -> np.ndarray:
        idx = self.bank_indices(n)
        return np.stack([y[idx[..., j]] for j, y in enumerate(self.bank.samples)], axis=-1)

    def __getitem__(self, n):
        return self.rows(n)

    def to_array(self, cap: int = MATERIALIZE_CAP) -> np.ndarray:
        N, s = self.shape
        if N * s > cap:
            raise CapExceededError(f"refusing to materialize {N} x {s} entries (cap {cap})")
        return self.rows(np.arange(N))


def sample_matrix(bank: SampleBank, layout: ReducedMCLayout) -> SampleMatrix:
    return SampleMatrix(bank, layout)


def reduced_mc_product(bank: SampleBank, layout: ReducedMCLayout, A,
                       counter: OpCounter | None = None) -> np.ndarray:
    """``X A`` for the reduced sample matrix ``X`` of ``bank``.

    Partial sums over coordinates ``j..s`` depend only on
    ``n mod N_j`` and are built from ``j = s`` down, ``tau * sum_j N_j``
    multiplications in total.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != layout.s:
        raise DimensionMismatchError(f"A has shape {A.shape}, expected ({layout.s}, tau)")
    if not bank.conforms(layout):
        raise DimensionMismatchError(
            f"bank sizes {[len(y) for y in bank.samples]} do not match {layout.sizes}")
    if counter is not None:
        counter.reset()
    P = descending_tiled_product(bank.samples, A, counter)
    return np.tile(P, (layout.N // P.shape[0], 1))


def reduced_mc_estimate(f: Callable, bank: SampleBank, layout: ReducedMCLayout,
                        A=None) -> float:
    """``Q(f) = (1/N) sum_n f(x_n)``.

    ``f`` maps an ``(N, s)`` array to ``N`` values, or an ``(N, tau)`` array
    when ``A`` is given, in which case the rows ``x_n^T A`` come from
    :func:`reduced_mc_product`.
    """
    if A is None:
        X = sample_matrix(bank, layout).to_array()
    else:
        X = reduced_mc_product(bank, layout, A)
    return float(np.mean(f(X)))


def tail_set(k: int, s: int) -> frozenset:
    """``{k, ..., s}`` (1-based); empty for ``k > s``."""
    return frozenset(range(k, s + 1))


def variance_formula(mu: Mapping[frozenset, float], layout: ReducedMCLayout) -> float:
    """Variance of ``Q(f)`` from the tail moments ``mu[{k..s}]`` and
    ``mu[frozenset()]``:

        sum_k mu_{k..s} prod_{j=k}^s M_j^{-1} (1 - 1/M_{k-1}) - mu_empty / M_s

    with ``1 - 1/M_0 = 1``.
    """
    s = layout.s
    need = [tail_set(k, s) for k in range(1, s + 1)] + [frozenset()]
    missing = [tuple(sorted(u)) for u in need if u not in mu]
    if missing:
        raise MissingEntryError(f"mu lacks entries for {missing}", missing=missing)
    M = layout.radices
    total = 0.0
    for k in range(1, s + 1):
        coeff = 1.0 / math.prod(M[k - 1:])
        if k > 1:
            coeff *= 1.0 - 1.0 / M[k - 2]
        total += mu[tail_set(k, s)] * coeff
    return total - mu[frozenset()] / M[-1]


def _grid(supports, probs):
    pts = np.array(list(itertools.product(*supports)), dtype=float)
    w = np.array([math.prod(c) for c in itertools.product(*probs)])
    return pts, w


def _check_supports(supports, probs, max_support=4, max_dim=5):
    if len(supports) != len(probs):
        raise DimensionMismatchError("supports and probabilities differ in length")
    if len(supports) > max_dim:
        raise CapExceededError(f"exact moments limited to s <= {max_dim}")
    for j, (x, p) in enumerate(zip(supports, probs)):
        if len(x) != len(p):
            raise DimensionMismatchError("support and probabilities differ", index=j + 1)
        if len(x) > max_support:
            raise CapExceededError(f"support size {len(x)} exceeds {max_support}", index=j + 1)
        if abs(sum(p) - 1.0) > 1e-12 or min(p) < 0:
            raise InvalidParameterError("probabilities must be nonnegative and sum to 1",
                                        index=j + 1)


def mu_tail_exact(f: Callable, supports, probs, u) -> float:
    """``mu_u = E_{x_u} [ (E_{x_-u} f(x_u, x_-u))**2 ]`` for independent
    coordinates with finite supports, by full enumeration.

    ``u`` is any subset of 1-based coordinates, not only a tail set.
    ``f`` maps an ``(n, s)`` array to ``n`` values.
    """
    _check_supports(supports, probs)
    s = len(supports)
    u = sorted(int(j) - 1 for j in u)
    if any(not 0 <= j < s for j in u):
        raise InvalidParameterError(f"u must lie in 1..{s}")
    pts, _ = _grid(supports, probs)
    shape = tuple(len(x) for x in supports)
    F = np.asarray(f(pts), dtype=float).reshape(shape)
    for j in reversed(range(s)):
        if j not in u:
            F = np.tensordot(F, np.asarray(probs[j], dtype=float), axes=([j], [0]))
    G = F * F
    for j in reversed(u):
        G = np.tensordot(G, np.asarray(probs[j], dtype=float), axes=([G.ndim - 1], [0]))
    return float(G)


def pairwise_variance(f: Callable, supports, probs, layout: ReducedMCLayout) -> float:
    """Exact variance of ``Q(f)`` from its definition as a double sum.

    ``Var Q = N**-2 sum_{n, n'} (E[f(x_n) f(x_n')] - (E f)**2)`` where the
    pair expectation depends only on the coordinates whose bank indices
    coincide, ``S = {j : n = n' mod N_j}``, and equals ``mu_S``.
    """
    N = layout.N
    sizes = np.array(layout.sizes, dtype=np.int64)
    n = np.arange(N, dtype=np.int64)
    same = (n[:, None, None] % sizes) == (n[None, :, None] % sizes)
    codes = same @ (1 << np.arange(layout.s))
    counts = np.bincount(codes.ravel(), minlength=1 << layout.s)
    mu0 = mu_tail_exact(f, supports, probs, ())
    total = 0.0
    for code in np.flatnonzero(counts):
        S = [j + 1 for j in range(layout.s) if code >> j & 1]
        total += counts[code] * (mu_tail_exact(f, supports, probs, S) - mu0)
    return total / N**2


def enumerate_variance(f: Callable, supports, probs, layout: ReducedMCLayout,
                       cap: int = 2**20) -> float:
    """Exact variance of ``Q(f)`` by enumerating every bank realization.

    Every coordinate uses the same finite distribution ``(supports[j],
    probs[j])`` for all its ``N_j`` draws. The number of realizations,
    ``prod_j |support_j|**N_j``, must not exceed ``cap``.
    """
    _check_supports(supports, probs)
    if len(supports) != layout.s:
        raise DimensionMismatchError(f"need {layout.s} supports, got {len(supports)}")
    total = math.prod(len(x)**n for x, n in zip(supports, layout.sizes))
    if total > cap:
        raise CapExceededError(f"{total} bank realizations exceed cap {cap}")
    # one "slot" per bank entry; enumerate all slot assignments at once
    slot_support = [np.asarray(x, float) for x, n in zip(supports, layout.sizes) for _ in range(n)]
    slot_prob = [np.asarray(p, float) for p, n in zip(probs, layout.sizes) for _ in range(n)]
    choice = np.array(list(itertools.product(*[range(len(x)) for x in slot_support])),
                      dtype=np.int64).reshape(total, len(slot_support))
    weight = np.ones(total)
    values = np.empty(choice.shape)
    for k, (x, p) in enumerate(zip(slot_support, slot_prob)):
        weight *= p[choice[:, k]]
        values[:, k] = x[choice[:, k]]
    offsets = np.cumsum((0,) + layout.sizes)
    n = np.arange(layout.N, dtype=np.int64)
    cols = [offsets[j] + n % N_j for j, N_j in enumerate(layout.sizes)]
    pts = np.stack([values[:, c] for c in cols], axis=-1)  # (total, N, s)
    fx = np.asarray(f(pts.reshape(-1, layout.s)), dtype=float).reshape(total, layout.N)
    Q = fx.mean(axis=1)
    mean = float(weight @ Q)
    return float(weight @ (Q - mean) ** 2)
