"""
Discrepancy quantities for reduced digital nets.

Subsets ``u`` are collections of 1-based coordinates. Dual-net elements are
returned as integer arrays with one row per element and one column per
coordinate of ``u`` in ascending order.
"""

from __future__ import annotations

import itertools
import math
import warnings

import numpy as np

from ..cbc import ProductWeights
from ..errors import (CapExceededError, DimensionMismatchError,
                      InvalidParameterError, MissingEntryError)
from ..pointset import ReductionIndices
from .nets import GeneratingMatrixSet, index_digits, subset_coords

__all__ = [
    "rho",
    "walsh",
    "character_sum",
    "dual_net",
    "r_w",
    "local_discrepancy",
    "local_discrepancy_bound",
    "weighted_star_discrepancy",
    "inverse_sine_square_sum",
    "discrepancy_bound_terms",
    "discrepancy_bound",
    "choose_w",
    "DUAL_CAP",
]

DUAL_CAP = 2**24


def rho(k, b: int):
    """``1`` for ``k = 0``, else ``1 / (b**r sin(pi kappa / b))`` with
    ``kappa`` the leading base-``b`` digit of ``k`` at position ``r``.

    Accepts scalars or integer arrays.
    """
    k = np.asarray(k, dtype=np.int64)
    if np.any(k < 0):
        raise InvalidParameterError("rho needs nonnegative integers")
    r = np.zeros(k.shape, dtype=np.int64)
    lead = k.copy()
    while np.any(lead >= b):
        big = lead >= b
        lead[big] //= b
        r[big] += 1
    # r counts digits after the leading one, so the leading position is r + 1
    with np.errstate(divide="ignore"):
        out = 1.0 / (float(b) ** (r + 1) * np.sin(np.pi * lead / b))
    out = np.where(k == 0, 1.0, out)
    return float(out) if out.ndim == 0 else out


def walsh(k: int, x, b: int, m: int):
    """Base-``b`` Walsh function ``wal_k`` at points ``x`` with at most ``m``
    digits: ``exp(2 pi i / b * sum_i kappa_i xi_{i+1})``."""
    num = np.rint(np.asarray(x, dtype=float) * b**m).astype(np.int64)
    xd = index_digits(num, b, m)[..., ::-1]  # xi_1, xi_2, ... xi_m
    kd = index_digits(np.int64(k), b, m)     # kappa_0, kappa_1, ...
    e = (xd @ kd) % b
    return np.exp(2j * np.pi * e / b)


def character_sum(points, u, k_u, b: int, m: int) -> float:
    """``|sum_n prod_{j in u} wal_{k_j}(z_{n,j})| / N`` over the rows of
    ``points``. It is 1 for dual-net members of a digital net, else 0."""
    coords = subset_coords(u, np.shape(points)[1])
    prod = np.ones(np.shape(points)[0], dtype=complex)
    for j, kj in zip(coords, k_u):
        prod *= walsh(int(kj), points[:, j], b, m)
    return float(abs(prod.sum()) / len(prod))


def _encode(v, b):
    return v @ (np.int64(b) ** np.arange(v.shape[-1], dtype=np.int64))


def dual_net(Chat: GeneratingMatrixSet, u, w: ReductionIndices,
             starred: bool = False, cap: int = DUAL_CAP) -> np.ndarray:
    """All ``k_u`` with ``0 <= k_j < b**(m - min(w_j, m))`` and
    ``sum_j Chat_j^T digits(k_j) = 0`` over GF(b).

    With ``starred`` only elements with every ``k_j >= 1`` are kept. The
    zero vector is a member of the unstarred set. All coordinates but the
    last are enumerated; the last is matched by a sorted lookup of its
    image vectors.
    """
    if (Chat.b, Chat.m, Chat.s) != (w.b, w.m, w.s):
        raise DimensionMismatchError("matrices and reduction indices disagree")
    b, m = Chat.b, Chat.m
    coords = subset_coords(u, Chat.s)
    sizes = [w.size(j) for j in coords]
    total = math.prod(sizes)
    if total > cap:
        raise CapExceededError(
            f"dual net search space has {total} candidates (cap {cap})")
    # image of every admissible k_j under Chat_j^T
    images = [(index_digits(np.arange(n), b, m) @ Chat.mats[j]) % b
              for j, n in zip(coords, sizes)]
    last = _encode(images[-1], b)
    order = np.argsort(last, kind="stable")
    last_sorted = last[order]
    head_sizes = sizes[:-1]
    n_head = math.prod(head_sizes)
    found = []
    chunk = max(1, 2**20 // max(1, m))
    for start in range(0, n_head, chunk):
        flat = np.arange(start, min(n_head, start + chunk))
        ks = np.unravel_index(flat, head_sizes) if head_sizes else ()
        acc = np.zeros((len(flat), m), dtype=np.int64)
        for img, kj in zip(images[:-1], ks):
            acc += img[kj]
        need = _encode((-acc) % b, b)
        lo = np.searchsorted(last_sorted, need, side="left")
        hi = np.searchsorted(last_sorted, need, side="right")
        cnt = hi - lo
        if not cnt.any():
            continue
        rows = np.repeat(np.arange(len(flat)), cnt)
        # position inside each matching run
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        k_last = order[np.repeat(lo, cnt) + offs]
        cols = [kj[rows] for kj in ks] + [k_last]
        found.append(np.stack(cols, axis=1))
    out = (np.concatenate(found) if found
           else np.zeros((0, len(coords)), dtype=np.int64))
    if starred:
        out = out[np.all(out >= 1, axis=1)]
    return out.astype(np.int64)


def r_w(Chat: GeneratingMatrixSet, u, w: ReductionIndices,
        cap: int = DUAL_CAP) -> float:
    """``sum_{k_u in dual net, k_u != 0} prod_j rho(k_j)``."""
    ks = dual_net(Chat, u, w, cap=cap)
    ks = ks[np.any(ks != 0, axis=1)]
    if not len(ks):
        return 0.0
    return float(np.prod(rho(ks, Chat.b), axis=1).sum())


def local_discrepancy(points, u, x) -> float:
    """``#{n : y_{n,j} < x_j for j in u} / N - prod_{j in u} x_j``.

    ``x`` has one entry per coordinate of ``points``; only those in ``u``
    are used.
    """
    points = np.asarray(points, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.shape != (points.shape[1],):
        raise DimensionMismatchError(
            f"x has shape {x.shape}, expected ({points.shape[1]},)")
    coords = subset_coords(u, points.shape[1])
    inside = np.all(points[:, coords] < x[coords], axis=1)
    return float(inside.mean() - np.prod(x[coords]))


def local_discrepancy_bound(Chat: GeneratingMatrixSet, u,
                            w: ReductionIndices, cap: int = DUAL_CAP) -> float:
    """Upper bound on ``|local_discrepancy|`` for the reduced net, valid for
    every ``x``: 1 when ``u`` reaches past ``s*``, otherwise
    ``1 - prod_{j in u}(1 - b**-(m - w_j)) + r_w``."""
    coords = subset_coords(u, Chat.s)
    if any(w.w[j] >= w.m for j in coords):
        return 1.0
    grid_term = 1.0 - math.prod(1.0 - float(w.b) ** -(w.m - w.w[j]) for j in coords)
    return grid_term + r_w(Chat, u, w, cap)


def _sup_abs_local(points):
    # sup over x in (0,1]^k of |Delta| for all coordinates of ``points``,
    # by checking both corners of every cell of the coordinate grid
    N, k = points.shape
    grids, idx = [], []
    for j in range(k):
        g = np.unique(np.concatenate(([0.0, 1.0], points[:, j])))
        grids.append(g)
        idx.append(np.searchsorted(g, points[:, j]))
    shape = tuple(len(g) for g in grids)
    hist = np.zeros(shape, dtype=np.int64)
    np.add.at(hist, tuple(idx), 1)
    le = hist
    for ax in range(k):
        le = np.cumsum(le, axis=ax)
    # le[i] = #{y <= g[i]}; on the cell (g[i], g[i+1]] the count is le[i]
    cnt = le[tuple(slice(0, -1) for _ in range(k))] / N
    lower = np.ones(cnt.shape)
    upper = np.ones(cnt.shape)
    for ax, g in enumerate(grids):
        sh = [1] * k
        sh[ax] = -1
        lower = lower * g[:-1].reshape(sh)
        upper = upper * g[1:].reshape(sh)
    return max(float(np.max(cnt - lower)), float(np.max(upper - cnt)))


def weighted_star_discrepancy(points, weights: ProductWeights,
                              cap: int = 2**24) -> float:
    """``sup_x max_u gamma_u |Delta_u(x)|`` computed exactly on the grid of
    point coordinates. Exponential in ``s``; meant as a test oracle."""
    points = np.asarray(points, dtype=float)
    N, s = points.shape
    if len(weights) < s:
        raise DimensionMismatchError(f"need {s} weights, got {len(weights)}")
    if (N + 2)**s > cap:
        raise CapExceededError(f"grid of size {(N + 2)**s} exceeds cap {cap}")
    best = 0.0
    for r in range(1, s + 1):
        for coords in itertools.combinations(range(s), r):
            g = weights.subset([j + 1 for j in coords])
            best = max(best, g * _sup_abs_local(points[:, list(coords)]))
    return best


def inverse_sine_square_sum(b: int) -> float:
    """``sum_{kappa=1}^{b-1} 1 / sin(pi kappa / b)**2``, equal to
    ``(b**2 - 1) / 3``."""
    kappa = np.arange(1, b)
    return float(np.sum(1.0 / np.sin(np.pi * kappa / b) ** 2))


_MAX_SUBSET_DIM = 20


def _t_array(t_table, n, masks_bits):
    if isinstance(t_table, (int, np.integer)):
        return np.full(len(masks_bits), int(t_table), dtype=np.int64)
    t = np.full(1 << n, -1, dtype=np.int64)
    for key, val in t_table.items():
        key = [int(j) for j in key]
        if key and all(1 <= j <= n for j in key):
            t[sum(1 << (j - 1) for j in set(key))] = int(val)
    missing = np.flatnonzero(t[1:] < 0) + 1
    if missing.size:
        subsets = [tuple(j + 1 for j in range(n) if mask >> j & 1)
                   for mask in missing[:10]]
        raise MissingEntryError(
            f"t-value table lacks {missing.size} of the required subsets of "
            f"1..{n}, e.g. {subsets}", missing=subsets)
    return t


def discrepancy_bound_terms(Chat, w: ReductionIndices, weights: ProductWeights,
                            t_table=None, *, single_inner_t: bool = False,
                            t_global: int | None = None) -> tuple[float, float]:
    """The two maxima of the weighted star discrepancy bound for a reduced
    net with product weights.

    The first is ``max_u prod_{j in u} gamma_j (1 + b**w_j) / b**m`` over
    nonempty ``u`` of ``[s]``, in closed form. The second is

        max_{v of [s*]} gamma_v sum_{p of v} b**(t_p - m) [
            ((b**2 + b) / 3)**|p| / b * max((m - t_p)**(|p|-1) / (|p|-1)!, 1/b)
            + ((b**2 - 1) / (3 b))**|p| prod_{j in p} (m - w_j) ]

    over nonempty subsets, evaluated with a subset-sum transform over
    ``2**s*`` masks (``s* <= 20``).

    ``t_table`` maps frozensets of 1-based coordinates to t-values, or is a
    single int used for every subset. When omitted it is computed from
    ``Chat`` by exhaustive interval checks. ``single_inner_t`` replaces
    ``m - t_p`` inside the inner max by ``m - t_global`` (default: the
    t-value of ``[s*]``).
    """
    b, m = w.b, w.m
    s, s_star = w.s, w.s_star
    if len(weights) < s:
        raise DimensionMismatchError(f"need {s} weights, got {len(weights)}")
    gam = weights.array(s)
    wm = np.minimum(np.array(w.w), m)
    f = gam * (1.0 + float(b) ** wm)
    first = float(np.prod(f[f > 1.0])) if np.any(f > 1.0) else float(f.max())
    first /= float(b) ** m

    n = s_star
    if n > _MAX_SUBSET_DIM:
        raise CapExceededError(f"s* = {n} exceeds the subset scan limit {_MAX_SUBSET_DIM}")
    if t_table is None:
        if Chat is None:
            raise InvalidParameterError("need either t_table or generating matrices")
        from .nets import t_value_table
        t_table = t_value_table(Chat, range(1, n + 1))
    masks = np.arange(1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    size = bits.sum(axis=1)
    t = _t_array(t_table, n, bits)
    if single_inner_t:
        if t_global is None:
            t_global = int(t[-1]) if n else 0
        t_inner = np.full_like(t, int(t_global))
    else:
        t_inner = t
    p = size[1:]
    tp = t[1:]
    base = (np.maximum(m - t_inner[1:], 0).astype(float) ** (p - 1)
            / np.array([math.factorial(int(k) - 1) for k in p]))
    lead = ((b * b + b) / 3.0) ** p / b * np.maximum(base, 1.0 / b)
    grid = np.where(bits[1:], (m - wm[:n])[None, :], 1).prod(axis=1)
    tail = ((b * b - 1) / (3.0 * b)) ** p * grid
    F = np.zeros(1 << n)
    F[1:] = float(b) ** (tp - m) * (lead + tail)
    # G[v] = sum over p of v, one axis per coordinate
    G = F.reshape((2,) * n) if n else F
    for ax in range(n):
        G = np.cumsum(G, axis=ax)
    G = G.reshape(-1)
    gam_v = np.exp(np.where(bits, np.log(gam[:n])[None, :], 0.0).sum(axis=1))
    second = float(np.max(gam_v[1:] * G[1:])) if n else 0.0
    return first, second


def discrepancy_bound(Chat, w: ReductionIndices, weights: ProductWeights,
                      t_table=None, *, single_inner_t: bool = False,
                      t_global: int | None = None) -> float:
    """Upper bound on the weighted star discrepancy of the reduced net; the
    sum of :func:`discrepancy_bound_terms`."""
    first, second = discrepancy_bound_terms(
        Chat, w, weights, t_table, single_inner_t=single_inner_t, t_global=t_global)
    return first + second


def choose_w(weights: ProductWeights, b: int, m: int, s: int,
             kappa: float) -> ReductionIndices:
    """Reduction indices keeping ``prod_j gamma_j (1 + b**w_j) <= kappa``.

    With ``j0`` the smallest index such that ``gamma_j <= 1`` for all
    ``j > j0`` (``j0 = 0`` when all weights are at most 1),

        w_j = min(floor(log_b(((kappa / gamma_1**j0)**(1/s) - 1) / gamma_j)), m),

    clamped below at 0, and ``w_1`` is set to 0. Both adjustments can only
    increase ``b**w_j`` for ``j > 1``; a ``RuntimeWarning`` is issued if the
    product guarantee fails afterwards.
    """
    gam = weights.array(s)
    above = np.flatnonzero(gam > 1.0)
    j0 = int(above[-1]) + 1 if above.size else 0
    floor_val = float(gam[0]) ** j0
    if not kappa > floor_val:
        raise InvalidParameterError(
            f"kappa must exceed gamma_1**j0 = {floor_val:.6g}, got {kappa}")
    base = (kappa / floor_val) ** (1.0 / s) - 1.0
    raw = np.floor(np.log(base / gam) / math.log(b) + 1e-12)
    w = np.clip(raw, 0, m).astype(np.int64)
    w[0] = 0
    f = gam * (1.0 + float(b) ** w)
    worst = float(np.prod(f[f > 1.0])) if np.any(f > 1.0) else float(f.max())
    if worst > kappa * (1 + 1e-12):
        warnings.warn(
            f"after clamping, max_u prod gamma_j (1 + b^w_j) = {worst:.6g} "
            f"exceeds kappa = {kappa:.6g}", RuntimeWarning, stacklevel=2)
    return ReductionIndices(b, m, tuple(int(v) for v in w))
