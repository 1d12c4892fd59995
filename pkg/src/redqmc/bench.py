"""
Timing sweeps for the reduced products and the basket option study.

Wall-clock numbers depend on the machine; the multiply and add tallies do
not, and the tests key on those. Generating-vector construction and other
setup run outside the timed region. Each phase boundary is appended to an
optional ``phase_log`` so that can be checked.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import FactorizationError, InvalidParameterError
from .fastprod import (OpCounter, ProductPlan, fast_reduced_product, naive_product,
                       optimized_fast_reduced_product)
from .pointset import (full_point_set, log_reduction_indices,
                       random_generating_vector)
from .reducedmc import ReducedMCLayout, draw_bank, reduced_mc_product

__all__ = [
    "ALGORITHMS",
    "TIMING_COLUMNS",
    "PRICING_COLUMNS",
    "BenchConfig",
    "TimingRow",
    "run_timing_sweep",
    "OptionModel",
    "cholesky",
    "PriceEstimate",
    "price_basket",
    "compute_reference",
    "load_reference",
    "run_option_study",
    "emit_plot_data",
    "read_plot_data",
    "loglog_slope",
]

ALGORITHMS = ("naive", "alg1", "alg2")
TIMING_COLUMNS = ("sweep", "algo", "mean_ns", "multiplies", "adds")
PRICING_COLUMNS = ("m", "c", "mean_abs_error")


@dataclass(frozen=True)
class BenchConfig:
    """One timing sweep. ``sweep`` names the varied parameter (``s``, ``m``
    or ``tau``) and ``values`` its strictly increasing settings; the other
    two are held at ``s``, ``m``, ``tau``."""

    sweep: str = "s"
    values: tuple[int, ...] = (50, 100, 200, 400, 800)
    b: int = 2
    m: int = 10
    s: int = 800
    tau: int = 20
    w: str = "log:1"
    algos: tuple[str, ...] = ALGORITHMS
    reps: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.sweep not in ("s", "m", "tau"):
            raise InvalidParameterError(f"sweep must be s, m or tau, got {self.sweep!r}")
        if self.reps < 1:
            raise InvalidParameterError(f"reps must be >= 1, got {self.reps}")
        vals = tuple(int(v) for v in self.values)
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise InvalidParameterError("sweep values must be strictly increasing")
        unknown = set(self.algos) - set(ALGORITHMS)
        if unknown:
            raise InvalidParameterError(f"unknown algorithms {sorted(unknown)}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "algos", tuple(self.algos))

    @classmethod
    def from_mapping(cls, cfg) -> "BenchConfig":
        """Build from string values as read by :func:`redqmc.io.read_config`."""
        kw = {}
        for key, val in cfg.items():
            if key in ("values", "algos"):
                parts = [p for p in val.replace(",", " ").split() if p]
                kw[key] = tuple(int(p) for p in parts) if key == "values" else tuple(parts)
            elif key in ("b", "m", "s", "tau", "reps", "seed"):
                kw[key] = int(val)
            elif key in ("sweep", "w"):
                kw[key] = val
            else:
                raise InvalidParameterError(f"unknown config key {key!r}")
        return cls(**kw)

    def point(self, value: int) -> tuple[int, int, int]:
        """``(m, s, tau)`` at one sweep value."""
        p = {"m": self.m, "s": self.s, "tau": self.tau}
        p[self.sweep] = int(value)
        return p["m"], p["s"], p["tau"]


@dataclass(frozen=True)
class TimingRow:
    sweep: int
    algo: str
    mean_ns: float
    multiplies: int
    adds: int


def _indices(cfg, m, s):
    from .io import parse_w_spec
    return parse_w_spec(cfg.w, cfg.b, m, s)


def _run(algo, plan):
    if algo == "naive":
        # the point set is built inside the timed region: the fast
        # algorithms generate their own points too
        return naive_product(full_point_set(plan.g), plan.A, plan.counter)
    if algo == "alg1":
        return fast_reduced_product(plan)
    return optimized_fast_reduced_product(plan)


def run_timing_sweep(cfg: BenchConfig, phase_log: list | None = None) -> list[TimingRow]:
    """Mean wall time and operation tallies per sweep value and algorithm."""
    log = phase_log if phase_log is not None else []
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for value in cfg.values:
        m, s, tau = cfg.point(value)
        log.append(("construct", "begin", value, None))
        ind = _indices(cfg, m, s)
        g = random_generating_vector(ind, rng)
        A = rng.uniform(-1.0, 1.0, size=(s, tau))
        log.append(("construct", "end", value, None))
        for algo in cfg.algos:
            plan = ProductPlan(A, g, OpCounter())
            _run(algo, plan)  # warm-up, also fills the counter
            mults, adds = plan.counter.multiplies, plan.counter.adds
            total = 0
            for _ in range(cfg.reps):
                log.append(("timed", "begin", value, algo))
                t0 = time.perf_counter_ns()
                _run(algo, plan)
                total += time.perf_counter_ns() - t0
                log.append(("timed", "end", value, algo))
            rows.append(TimingRow(value, algo, total / cfg.reps, mults, adds))
    return rows


@dataclass(frozen=True, eq=False)
class OptionModel:
    """Basket call on ``s`` assets under Black-Scholes with zero rate."""

    S0: np.ndarray
    T: float
    K: float
    Sigma: np.ndarray
    L: np.ndarray = field(init=False)

    def __post_init__(self):
        S0 = np.asarray(self.S0, dtype=float)
        Sigma = np.asarray(self.Sigma, dtype=float)
        if Sigma.shape != (len(S0), len(S0)):
            raise InvalidParameterError(
                f"Sigma has shape {Sigma.shape}, expected {(len(S0), len(S0))}")
        object.__setattr__(self, "S0", S0)
        object.__setattr__(self, "Sigma", Sigma)
        object.__setattr__(self, "L", cholesky(Sigma))

    @property
    def s(self) -> int:
        return len(self.S0)

    @classmethod
    def tridiagonal(cls, s: int = 10, S0: float = 100.0, T: float = 1.0,
                    K: float = 110.0, sigma: float = 0.4, rho: float = 0.2) -> "OptionModel":
        """Covariance with ``sigma`` on the diagonal and ``rho`` next to it."""
        Sigma = (np.diag(np.full(s, sigma)) + np.diag(np.full(s - 1, rho), 1)
                 + np.diag(np.full(s - 1, rho), -1))
        return cls(np.full(s, S0), T, K, Sigma)

    def payoff(self, W) -> np.ndarray:
        """Payoff at maturity for rows ``W`` of correlated normals."""
        ST = self.S0 * np.exp(-0.5 * np.diag(self.Sigma) * self.T + W * math.sqrt(self.T))
        return np.maximum(ST.mean(axis=1) - self.K, 0.0)


def cholesky(Sigma) -> np.ndarray:
    """Lower-triangular ``L`` with ``L L^T = Sigma``; raises
    :class:`FactorizationError` unless ``Sigma`` is symmetric positive
    definite."""
    Sigma = np.asarray(Sigma, dtype=float)
    if Sigma.ndim != 2 or Sigma.shape[0] != Sigma.shape[1]:
        raise FactorizationError(f"need a square matrix, got shape {Sigma.shape}")
    if not np.allclose(Sigma, Sigma.T, rtol=0, atol=1e-12 * max(1.0, np.abs(Sigma).max())):
        raise FactorizationError("matrix is not symmetric")
    try:
        return np.linalg.cholesky(Sigma)
    except np.linalg.LinAlgError:
        raise FactorizationError("matrix is not positive definite") from None


@dataclass(frozen=True)
class PriceEstimate:
    mean: float
    se: float
    estimates: tuple[float, ...]


def _rep_seed(seed, tag, rep):
    return [int(seed), int(tag), int(rep)]


def price_basket(model: OptionModel, m: int, reps: int = 1, c: float = 0.0,
                 b: int = 2, seed: int = 0, chunk_m: int = 16) -> PriceEstimate:
    """Monte Carlo price with ``N = b**m`` samples per repetition.

    ``c = 0`` is plain Monte Carlo; ``c > 0`` uses reduced Monte Carlo with
    ``w_j = min(floor(log_b j**c), m)``. The correlated normals ``X L^T``
    come from the reduced product. Large ``m`` is split into independent
    blocks of ``b**chunk_m`` samples to bound memory; each block has its own
    reduced layout.
    """
    if reps < 1:
        raise InvalidParameterError(f"reps must be >= 1, got {reps}")
    mb = min(m, chunk_m)
    layout = ReducedMCLayout(log_reduction_indices(b, mb, model.s, c))
    blocks = b**(m - mb)
    tag = int(round(c * 1000))
    A = model.L.T
    est = []
    for r in range(reps):
        total = 0.0
        for k in range(blocks):
            bank = draw_bank(layout, "normal", _rep_seed(seed, tag, r * blocks + k))
            total += model.payoff(reduced_mc_product(bank, layout, A)).sum()
        est.append(total / b**m)
    est = np.array(est)
    se = float(est.std(ddof=1) / math.sqrt(reps)) if reps > 1 else float("nan")
    return PriceEstimate(float(est.mean()), se, tuple(float(v) for v in est))


_REFERENCE = "basket_reference.json"


def compute_reference(model: OptionModel | None = None, m: int = 20, reps: int = 5,
                      seed: int = 20240101, path=None) -> dict:
    """High-sample plain Monte Carlo price, optionally written as JSON."""
    model = OptionModel.tridiagonal() if model is None else model
    est = price_basket(model, m, reps, c=0.0, seed=seed)
    ref = {
        "price": est.mean,
        "se": est.se,
        "m": m,
        "reps": reps,
        "seed": seed,
        "model": {"s": model.s, "S0": float(model.S0[0]), "T": model.T,
                  "K": model.K, "sigma": float(model.Sigma[0, 0]),
                  "rho": float(model.Sigma[0, 1]) if model.s > 1 else 0.0},
        "note": "computed by compute_reference with plain Monte Carlo",
    }
    if path is not None:
        Path(path).write_text(json.dumps(ref, indent=2) + "\n")
    return ref


def load_reference() -> dict:
    """The stored reference price for :meth:`OptionModel.tridiagonal`."""
    return json.loads(resources.files("redqmc").joinpath("data", _REFERENCE).read_text())


def run_option_study(model: OptionModel, m_values: Sequence[int],
                     c_values: Sequence[float], reps: int, reference: float,
                     seed: int = 0, b: int = 2) -> list[dict]:
    """Mean absolute error against ``reference`` for each ``(m, c)``.

    Rows also carry the mean estimate and its standard error.
    """
    rows = []
    for c in c_values:
        for m in m_values:
            est = price_basket(model, m, reps, c=c, b=b, seed=seed)
            err = float(np.mean(np.abs(np.array(est.estimates) - reference)))
            rows.append({"m": m, "c": c, "mean_abs_error": err,
                         "mean": est.mean, "se": est.se})
    return rows


def emit_plot_data(rows, path, kind: str = "timing") -> Path:
    """Write timing or pricing rows as CSV with a fixed header."""
    cols = TIMING_COLUMNS if kind == "timing" else PRICING_COLUMNS
    if kind not in ("timing", "pricing"):
        raise InvalidParameterError(f"unknown plot data kind {kind!r}")
    path = Path(path)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(cols)
        for row in rows:
            rec = row if isinstance(row, dict) else row.__dict__
            wr.writerow([_fmt(rec[c]) for c in cols])
    return path


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def read_plot_data(path) -> list[dict]:
    """Rows of a CSV written by :func:`emit_plot_data`, values as strings."""
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])
