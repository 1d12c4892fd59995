"""
Fast products ``P = X A`` for reduced lattice point sets.

``X`` is the ``N x s`` matrix of lattice points and ``A`` an arbitrary
``s x tau`` matrix with rows ``a_j``. Because column ``j`` of ``X`` is a
length ``n_j = b**(m - w_j)`` vector ``X_j`` tiled ``N / n_j`` times and the
``n_j`` divide each other, the product can be accumulated from the last
coordinate to the first:

    P_{s*+1} = 0 (one row),
    P_j      = tile(P_{j+1}) + X_j a_j        (n_j rows),

which costs ``tau * sum_{j <= s*} n_j`` multiplications instead of
``N s tau``. :func:`optimized_fast_reduced_product` groups the coordinates
that share a reduction index and does one block product per level.

Operation counts follow one convention throughout: every scalar product
term is one multiplication and one addition into an accumulator, and
replicating rows (tiling) is free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidParameterError
from .pointset import ReducedGeneratingVector, ReductionIndices

__all__ = [
    "OpCounter",
    "ProductPlan",
    "GroupedPlan",
    "ComplexityReport",
    "naive_product",
    "fast_reduced_product",
    "optimized_fast_reduced_product",
    "descending_tiled_product",
    "complexity_report",
]


@dataclass
class OpCounter:
    """Tallies of scalar multiplications and additions in a numeric kernel,
    plus the peak number of live scalars held by the kernel."""

    multiplies: int = 0
    adds: int = 0
    peak_scalars: int = 0

    def reset(self):
        self.multiplies = 0
        self.adds = 0
        self.peak_scalars = 0

    def storage(self, scalars: int):
        if scalars > self.peak_scalars:
            self.peak_scalars = scalars


@dataclass
class ProductPlan:
    """Matrix ``A`` paired with the reduced lattice it is multiplied by."""

    A: np.ndarray
    g: ReducedGeneratingVector
    counter: OpCounter = field(default_factory=OpCounter)
    last_algo: str | None = None
    last_transformed: bool = False

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        if self.A.ndim != 2:
            raise DimensionMismatchError(f"A must be 2-d, got shape {self.A.shape}")
        if self.A.shape[0] != self.g.s:
            raise DimensionMismatchError(
                f"A has {self.A.shape[0]} rows but the lattice has s={self.g.s}")

    @property
    def tau(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class GroupedPlan:
    """Coordinates (0-based) of ``1..s*`` grouped by reduction level."""

    levels: tuple[tuple[int, ...], ...]

    @classmethod
    def from_indices(cls, indices: ReductionIndices) -> "GroupedPlan":
        levels = [[] for _ in range(indices.m)]
        for j, wj in enumerate(indices.w):
            if wj < indices.m:
                levels[wj].append(j)
        return cls(tuple(tuple(v) for v in levels))

    @property
    def tau(self) -> tuple[int, ...]:
        """Number of coordinates at each level ``I = 0..m-1``."""
        return tuple(len(v) for v in self.levels)


def naive_product(X, A, counter: OpCounter | None = None) -> np.ndarray:
    """Plain ``X @ A``; counts ``N s tau`` multiplications and additions."""
    X = np.asarray(X, dtype=float)
    A = np.asarray(A, dtype=float)
    if X.ndim != 2 or A.ndim != 2 or X.shape[1] != A.shape[0]:
        raise DimensionMismatchError(
            f"cannot multiply {X.shape} by {A.shape}")
    if counter is not None:
        counter.reset()
        ops = X.shape[0] * X.shape[1] * A.shape[1]
        counter.multiplies = ops
        counter.adds = ops
        counter.storage(X.size + A.shape[1] * X.shape[0])
    return X @ A


def descending_tiled_product(columns: Sequence[np.ndarray], A,
                             counter: OpCounter | None = None,
                             initial=None) -> np.ndarray:
    """Accumulate ``sum_j tile(columns[j]) a_j`` from the last column down.

    ``len(columns[j+1])`` must divide ``len(columns[j])``; the result has
    ``len(columns[0])`` rows, and row ``k`` uses entry ``k mod len(c_j)``
    of every column. ``initial`` is an optional starting row (defaults to
    zero). Tiling is done by broadcasting the previous partial result
    against a reshaped view, so no tiled copy of it is made.
    """
    A = np.asarray(A, dtype=float)
    tau = A.shape[1]
    P = np.zeros((1, tau)) if initial is None else np.array(initial, dtype=float).reshape(1, tau)
    rows = 1
    mult = 0
    for j in range(len(columns) - 1, -1, -1):
        col = columns[j]
        n = col.shape[0]
        if n % rows:
            raise InvalidParameterError(
                f"column sizes must divide each other: {n} vs {rows}",
                index=j + 1)
        Q = col[:, None] * A[j]
        Q.shape = (n // rows, rows, tau)
        Q += P
        Q.shape = (n, tau)
        if counter is not None:
            counter.storage(rows * tau + n * tau + n)
        mult += n * tau
        P, rows = Q, n
    if counter is not None:
        counter.multiplies += mult
        counter.adds += mult
    return P


def _columns(g: ReducedGeneratingVector, coords, transforms, zero_remap):
    # one (n, count) block per distinct size; columns are views into it
    coords = list(coords)
    sizes = [g.indices.size(j) for j in coords]
    cols = [None] * len(coords)
    for n in set(sizes):
        pos = [i for i, sz in enumerate(sizes) if sz == n]
        z = np.array([g.z[coords[i]] for i in pos], dtype=np.int64)
        block = (np.arange(n, dtype=np.int64)[:, None] * z) % n / n
        for c, i in enumerate(pos):
            col = block[:, c]
            if transforms is not None:
                col = transforms[coords[i]].apply(col, zero_remap=zero_remap)
            cols[i] = col
    return cols


def _check_transforms(transforms, s):
    if transforms is None:
        return None
    transforms = list(transforms)
    if len(transforms) != s:
        raise DimensionMismatchError(
            f"expected {s} transforms, got {len(transforms)}")
    return transforms


def _expand_rows(P, N):
    if P.shape[0] == N:
        return P
    return np.tile(P, (N // P.shape[0], 1))


def fast_reduced_product(plan: ProductPlan, transforms=None) -> np.ndarray:
    """``X A`` for the reduced lattice of ``plan.g`` by the per-coordinate
    tiling recursion.

    Coordinates with ``w_j >= m`` have an all-zero column and are skipped.
    With ``transforms`` (one per coordinate, each providing
    ``apply(column, zero_remap=...)``) every reduced column is mapped before
    use. Since a mapped zero column need not vanish, all ``s`` coordinates
    then enter the recursion, the ones beyond ``s*`` as single rows.

    Returns the ``N x tau`` product in lattice order ``k = 0..N-1``.
    """
    g, A = plan.g, plan.A
    transforms = _check_transforms(transforms, g.s)
    plan.counter.reset()
    ind = g.indices
    coords = range(g.s) if transforms is not None else range(ind.s_star)
    cols = _columns(g, coords, transforms, 0.5 * float(ind.b)**-ind.m)
    P = descending_tiled_product(cols, A[:len(cols)], plan.counter)
    plan.last_algo = "alg1"
    plan.last_transformed = transforms is not None
    # physical tiling only happens here, for the returned matrix
    return _expand_rows(P, g.N)


def optimized_fast_reduced_product(plan: ProductPlan,
                                   groups: GroupedPlan | None = None,
                                   transforms=None) -> np.ndarray:
    """``X A`` by one block product per reduction level.

    Level ``I`` holds the ``tau_I`` coordinates with ``w_j = I``. Starting
    from one zero row at level ``m``, each level tiles the running result
    ``b`` times and adds ``X_I A_I`` where ``X_I`` has the ``b**(m-I)``
    reduced points of its coordinates as columns. Empty levels only tile.

    ``X_I A_I`` is a direct dense product, ``tau_I b**(m-I) tau``
    multiplications per level. Transforms are accepted only if all
    coordinates within a level share an equal transform.
    """
    g, A = plan.g, plan.A
    ind = g.indices
    b, m = ind.b, ind.m
    if groups is None:
        groups = GroupedPlan.from_indices(ind)
    elif len(groups.levels) != m:
        raise DimensionMismatchError(f"grouped plan has {len(groups.levels)} levels, need {m}")
    transforms = _check_transforms(transforms, g.s)
    zero_remap = 0.5 * float(b)**-m
    plan.counter.reset()
    counter = plan.counter
    tau = plan.tau

    if transforms is not None:
        for I, idx in enumerate(groups.levels):
            if any(transforms[j] != transforms[idx[0]] for j in idx[1:]):
                raise InvalidParameterError(
                    f"coordinates at reduction level {I} use different "
                    "transforms; the grouped product needs one per level",
                    index=idx[0] + 1)
    P = np.zeros((1, tau))
    if transforms is not None:
        # coordinates beyond s* are constant columns after the transform
        for j in range(ind.s_star, g.s):
            v = float(transforms[j].apply(np.zeros(1), zero_remap=zero_remap)[0])
            P += v * A[j]
            counter.multiplies += tau
            counter.adds += tau
    rows = 1
    for I in range(m - 1, -1, -1):
        idx = groups.levels[I]
        n = b**(m - I)
        if idx:
            k = np.arange(n, dtype=np.int64)[:, None]
            zI = np.asarray([g.z[j] for j in idx], dtype=np.int64)[None, :]
            XI = (k * zI) % n / n
            if transforms is not None:
                XI = transforms[idx[0]].apply(XI, zero_remap=zero_remap)
            Q = XI @ A[list(idx)]
            Q.shape = (b, rows, tau)
            Q += P
            ops = len(idx) * n * tau
            counter.multiplies += ops
            counter.adds += ops
            counter.storage(rows * tau + n * tau + n * len(idx))
        else:
            Q = np.broadcast_to(P, (b, rows, tau)).copy()
            counter.storage(rows * tau + n * tau)
        Q.shape = (n, tau)
        P, rows = Q, n
    plan.last_algo = "alg2"
    plan.last_transformed = transforms is not None
    return P


@dataclass(frozen=True)
class ComplexityReport:
    algo: str
    multiplies: int
    adds: int
    predicted_multiplies: int
    peak_scalars: int
    storage_bound: int


def predicted_multiplies(indices: ReductionIndices, tau: int,
                         transformed: bool = False) -> int:
    """``tau * sum_{j <= s*} b**(m - w_j)`` (plus ``tau`` per coordinate
    beyond ``s*`` when a transform makes those columns nonzero)."""
    total = sum(indices.size(j) for j in range(indices.s_star))
    if transformed:
        total += indices.s - indices.s_star
    return tau * total


def complexity_report(plan: ProductPlan) -> ComplexityReport:
    """Operation tallies of the product last run on ``plan``.

    Raises ``RuntimeError`` if the tally exceeds the predicted count, which
    would indicate a bug in the kernel.
    """
    if plan.last_algo is None:
        raise InvalidParameterError("no product has been run on this plan")
    ind = plan.g.indices
    tau = plan.tau
    pred = predicted_multiplies(ind, tau, plan.last_transformed)
    c = plan.counter
    if c.multiplies > pred:
        raise RuntimeError(
            f"{plan.last_algo}: {c.multiplies} multiplies exceeds prediction {pred}")
    widest = max(GroupedPlan.from_indices(ind).tau + (1,))
    extra = ind.N * (widest if plan.last_algo == "alg2" else 1)
    return ComplexityReport(plan.last_algo, c.multiplies, c.adds, pred,
                            c.peak_scalars, 2 * ind.N * tau + extra)
