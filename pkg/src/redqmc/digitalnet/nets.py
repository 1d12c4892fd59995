"""
Digital nets over GF(b) and their row-zeroing reduction.

Point ``n`` coordinate ``j`` has digit vector ``C^(j) n`` where ``n`` is
written with its least significant base-``b`` digit first, and the output
digits are read as ``y = sum_p y_p b**-p``. Zeroing the last ``min(w_j, m)``
rows of ``C^(j)`` confines coordinate ``j`` to the grid of step
``b**-(m - min(w_j, m))``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..errors import (CapExceededError, DimensionMismatchError,
                      InvalidParameterError)
from ..fastprod import OpCounter
from ..pointset import MATERIALIZE_CAP, ReductionIndices, is_prime

__all__ = [
    "GeneratingMatrixSet",
    "identity_matrices",
    "random_matrices",
    "gf_rank",
    "index_digits",
    "digital_point",
    "reduce_matrices",
    "reduced_net_numerators",
    "reduced_net",
    "fast_net_product",
    "verify_t_value",
    "subset_coords",
    "t_value_table",
]


@dataclass(frozen=True, eq=False)
class GeneratingMatrixSet:
    """``s`` generating matrices of size ``m x m`` over GF(b).

    ``mats[j, p, q]`` is the entry in row ``p + 1``, column ``q + 1`` of
    ``C^(j+1)``.
    """

    b: int
    m: int
    mats: np.ndarray

    def __post_init__(self):
        if not isinstance(self.b, (int, np.integer)) or not is_prime(int(self.b)):
            raise InvalidParameterError(f"base b must be a prime, got {self.b!r}")
        mats = np.array(self.mats, dtype=np.int64)
        if mats.ndim == 2:
            mats = mats[None]
        if mats.ndim != 3 or mats.shape[1:] != (self.m, self.m):
            raise DimensionMismatchError(
                f"expected s matrices of shape ({self.m}, {self.m}), got {mats.shape}")
        bad = np.argwhere((mats < 0) | (mats >= self.b))
        if bad.size:
            raise InvalidParameterError(
                f"matrix entries must lie in 0..{self.b - 1}", index=int(bad[0, 0]) + 1)
        mats.flags.writeable = False
        object.__setattr__(self, "b", int(self.b))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "mats", mats)

    @property
    def s(self) -> int:
        return self.mats.shape[0]

    @property
    def N(self) -> int:
        return self.b**self.m

    def subset(self, coords) -> "GeneratingMatrixSet":
        """Matrices of the given 0-based coordinates."""
        return GeneratingMatrixSet(self.b, self.m, self.mats[list(coords)])

    def __eq__(self, other):
        return (isinstance(other, GeneratingMatrixSet) and self.b == other.b
                and self.m == other.m and np.array_equal(self.mats, other.mats))

    __hash__ = None


def identity_matrices(b: int, m: int, s: int) -> GeneratingMatrixSet:
    """Every coordinate is the van der Corput sequence in base ``b``."""
    return GeneratingMatrixSet(b, m, np.broadcast_to(np.eye(m, dtype=np.int64), (s, m, m)))


def gf_rank(M, b: int) -> int:
    """Rank of an integer matrix over GF(b)."""
    A = np.array(M, dtype=np.int64) % b
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, b) % b
        others = np.arange(rows) != r
        A[others] = (A[others] - np.outer(A[others, c], A[r])) % b
        r += 1
        if r == rows:
            break
    return r


def random_matrices(b: int, m: int, s: int, rng=None,
                    invertible: bool = False) -> GeneratingMatrixSet:
    """Uniformly random matrices, optionally conditioned on being invertible."""
    rng = np.random.default_rng(rng)
    mats = rng.integers(0, b, size=(s, m, m))
    if invertible:
        for j in range(s):
            while gf_rank(mats[j], b) < m:
                mats[j] = rng.integers(0, b, size=(m, m))
    return GeneratingMatrixSet(b, m, mats)


def index_digits(n, b: int, m: int) -> np.ndarray:
    """Base-``b`` digits of ``n``, least significant first; shape
    ``n.shape + (m,)``."""
    n = np.asarray(n, dtype=np.int64)
    powers = np.int64(b) ** np.arange(m, dtype=np.int64)
    return (n[..., None] // powers) % b


def _digits_to_numerator(y, b, m):
    # digit p (1-based) has weight b**-p, i.e. b**(m-p) over the common b**m
    weights = np.int64(b) ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return y @ weights


def digital_point(n: int, C: GeneratingMatrixSet, j: int) -> float:
    """Coordinate ``j`` (0-based) of point ``n``.

    >>> digital_point(5, identity_matrices(2, 3, 1), 0)
    0.625
    """
    if not 0 <= n < C.N:
        raise InvalidParameterError(f"index n={n} outside 0..{C.N - 1}")
    y = (C.mats[j] @ index_digits(n, C.b, C.m)) % C.b
    return float(_digits_to_numerator(y, C.b, C.m)) / C.N


def reduce_matrices(C: GeneratingMatrixSet, w: ReductionIndices) -> GeneratingMatrixSet:
    """Zero the last ``min(w_j, m)`` rows of each ``C^(j)``."""
    if w.s != C.s or w.b != C.b or w.m != C.m:
        raise DimensionMismatchError(
            f"matrices are (b={C.b}, m={C.m}, s={C.s}) but indices are "
            f"(b={w.b}, m={w.m}, s={w.s})")
    mats = np.array(C.mats)
    for j, wj in enumerate(w.w):
        keep = C.m - min(wj, C.m)
        mats[j, keep:, :] = 0
    return GeneratingMatrixSet(C.b, C.m, mats)


def _net_numerators(C: GeneratingMatrixSet, cap: int) -> np.ndarray:
    N, s = C.N, C.s
    if N * s > cap:
        raise CapExceededError(f"refusing to materialize {N} x {s} entries (cap {cap})")
    digits = index_digits(np.arange(N), C.b, C.m)
    out = np.empty((N, s), dtype=np.int64)
    for j in range(s):
        out[:, j] = _digits_to_numerator((digits @ C.mats[j].T) % C.b, C.b, C.m)
    return out


def reduced_net_numerators(C: GeneratingMatrixSet, w: ReductionIndices | None = None,
                           cap: int = MATERIALIZE_CAP) -> np.ndarray:
    """Points of the (reduced) net as integers over ``b**m``; shape ``(N, s)``.

    With ``w=None`` the matrices are used as given.
    """
    if w is not None:
        C = reduce_matrices(C, w)
    return _net_numerators(C, cap)


def reduced_net(C: GeneratingMatrixSet, w: ReductionIndices | None = None,
                cap: int = MATERIALIZE_CAP) -> np.ndarray:
    """All ``b**m`` points of the reduced net as an ``(N, s)`` float array."""
    return reduced_net_numerators(C, w, cap) / float(C.N)


def fast_net_product(net, A, w: ReductionIndices,
                     counter: OpCounter | None = None) -> np.ndarray:
    """``net @ A`` for a reduced net by table lookup.

    For each ``j <= s*`` the ``n_j = b**(m - w_j)`` multiples
    ``(k / n_j) a_j`` are formed once and gathered by the grid index
    ``y_{n,j} n_j`` of every point. Multiplications drop to
    ``tau * sum_{j <= s*} n_j``; the ``N s* tau`` additions remain.

    Columns beyond ``s*`` must be zero. A value off the grid of its
    coordinate raises :class:`InvalidParameterError`.
    """
    net = np.asarray(net, dtype=float)
    A = np.asarray(A, dtype=float)
    N = w.N
    if net.shape != (N, w.s):
        raise DimensionMismatchError(f"net has shape {net.shape}, expected ({N}, {w.s})")
    if A.ndim != 2 or A.shape[0] != w.s:
        raise DimensionMismatchError(f"A has shape {A.shape}, expected ({w.s}, tau)")
    tau = A.shape[1]
    s_star = w.s_star
    if s_star < w.s and np.any(net[:, s_star:]):
        raise InvalidParameterError(
            "columns with w_j >= m must be zero", index=s_star + 1)
    if counter is not None:
        counter.reset()
    P = np.zeros((N, tau))
    for j in range(s_star - 1, -1, -1):
        n = w.size(j)
        scaled = net[:, j] * n
        idx = np.rint(scaled)
        off = (np.abs(scaled - idx) > 1e-9) | (idx < 0) | (idx >= n)
        if np.any(off):
            raise InvalidParameterError(
                f"point {int(np.argmax(off))} is not on the grid of step 1/{n}",
                index=j + 1)
        table = (np.arange(n) / n)[:, None] * A[j]
        P += table[idx.astype(np.int64)]
        if counter is not None:
            counter.multiplies += n * tau
            counter.adds += N * tau
            counter.storage(2 * N * tau + n * tau)
    return P


def _compositions(total, parts):
    # nonnegative integer vectors of length ``parts`` summing to ``total``
    for cut in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cut:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 2 - prev)
        yield tuple(out)


def _is_net_of(num_u, b, m, t):
    # every elementary box of volume b**(t-m) holds exactly b**t points
    npts = num_u.shape[0]
    k = num_u.shape[1]
    for d in _compositions(m - t, k):
        cell = np.zeros(npts, dtype=np.int64)
        for i, di in enumerate(d):
            cell = cell * b**di + num_u[:, i] // b**(m - di)
        counts = np.bincount(cell, minlength=b**(m - t))
        if np.any(counts != b**t):
            return False
    return True


def subset_coords(u, s):
    """0-based sorted coordinates of a 1-based subset ``u``."""
    u = sorted(int(j) for j in u)
    if not u:
        raise InvalidParameterError("u must be nonempty")
    if u[0] < 1 or u[-1] > s or len(set(u)) != len(u):
        raise InvalidParameterError(f"u must be distinct coordinates in 1..{s}, got {u}")
    return [j - 1 for j in u]


def verify_t_value(C: GeneratingMatrixSet, u, cap: int = 2**26) -> int:
    """Smallest ``t`` such that the projection onto ``u`` (1-based
    coordinates) is a ``(t, m, |u|)``-net, by checking every elementary
    interval.

    The work is ``b**m`` times the number of interval shapes, which must not
    exceed ``cap``.
    """
    u = subset_coords(u, C.s)
    b, m = C.b, C.m
    shapes = math.comb(m + len(u) - 1, len(u) - 1)
    if b**m * shapes > cap:
        raise CapExceededError(
            f"t-value check needs {b**m} points x {shapes} shapes (cap {cap})")
    num = _net_numerators(C.subset(u), MATERIALIZE_CAP)
    for t in range(m + 1):
        if _is_net_of(num, b, m, t):
            return t
    return m  # unreachable: t = m always holds


def t_value_table(C: GeneratingMatrixSet, coords=None,
                  cap: int = 2**26) -> dict[frozenset, int]:
    """``t_u`` for every nonempty subset of ``coords`` (1-based, default all).

    Keys are frozensets of 1-based coordinates.
    """
    coords = range(1, C.s + 1) if coords is None else coords
    coords = [j + 1 for j in subset_coords(coords, C.s)]
    table = {}
    for r in range(1, len(coords) + 1):
        for u in itertools.combinations(coords, r):
            table[frozenset(u)] = verify_t_value(C, u, cap)
    return table
