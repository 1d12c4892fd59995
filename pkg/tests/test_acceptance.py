"""Acceptance criteria, one test each. Every test records a PASS/FAIL line
that is printed in the pytest terminal summary."""

import itertools
import math
import time
from fractions import Fraction

import numpy as np

from redqmc.bench import (BenchConfig, OptionModel, load_reference, loglog_slope,
                          run_option_study, run_timing_sweep)
from redqmc.cbc import (KorobovParams, ProductWeights, dual_lattice_error,
                        dual_lattice_tail_bound, reduced_cbc,
                        reduced_lattice_error_bound, sq_worst_case_error)
from redqmc.digitalnet import (fast_net_product, inverse_sine_square_sum,
                               local_discrepancy, local_discrepancy_bound,
                               random_matrices, reduce_matrices, reduced_net)
from redqmc.fastprod import (OpCounter, ProductPlan, fast_reduced_product,
                             naive_product, optimized_fast_reduced_product)
from redqmc.pointset import (ReducedGeneratingVector, ReductionIndices,
                             full_point_set, log_reduction_indices,
                             random_generating_vector)
from redqmc.reducedmc import (ReducedMCLayout, draw_bank, enumerate_variance,
                              mu_tail_exact, pairwise_variance, reduced_mc_estimate,
                              reduced_mc_product, tail_set, variance_formula)

from .conftest import random_config, report

SWEEP = 200
SWEEP_SEED = 2024


def _sweep():
    rng = np.random.default_rng(SWEEP_SEED)
    for _ in range(SWEEP):
        yield random_config(rng, max_m=10, max_s=64, max_tau=8, max_points=3**10)


def _predicted(ind, tau):
    return tau * sum(ind.b**(ind.m - ind.w[j]) for j in range(ind.s_star))


def _net_case(g, A, seed):
    ind = g.indices
    C = random_matrices(ind.b, ind.m, ind.s, seed)
    return reduced_net(C, ind)


def test_c01_alg1_matches_naive():
    t0 = time.perf_counter()
    worst = 0.0
    ok = True
    for g, A in _sweep():
        X = full_point_set(g)
        ref = naive_product(X, A)
        err = float(np.max(np.abs(fast_reduced_product(ProductPlan(A, g)) - ref)))
        worst = max(worst, err / g.s)
        ok &= err <= 1e-12 * g.s
    dt = time.perf_counter() - t0
    ok &= dt < 30
    report(1, ok, f"{SWEEP} configs, max err/s = {worst:.2e}, {dt:.1f} s")
    assert ok


def test_c02_alg2_and_net_product_match_naive():
    t0 = time.perf_counter()
    worst = {"alg2": 0.0, "alg2-alg1": 0.0, "alg4": 0.0}
    ok = True
    for i, (g, A) in enumerate(_sweep()):
        tol = 1e-12 * g.s
        ref = naive_product(full_point_set(g), A)
        a2 = optimized_fast_reduced_product(ProductPlan(A, g))
        a1 = fast_reduced_product(ProductPlan(A, g))
        net = _net_case(g, A, i)
        a4 = fast_net_product(net, A, g.indices)
        errs = {"alg2": np.max(np.abs(a2 - ref)), "alg2-alg1": np.max(np.abs(a2 - a1)),
                "alg4": np.max(np.abs(a4 - naive_product(net, A)))}
        for k, e in errs.items():
            worst[k] = max(worst[k], float(e) / g.s)
            ok &= e <= tol
    dt = time.perf_counter() - t0
    ok &= dt < 60
    report(2, ok, "max err/s " + ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
           + f", {dt:.1f} s")
    assert ok


def test_c03_counter_laws():
    checked = 0
    ok = True
    for i, (g, A) in enumerate(_sweep()):
        ind, tau = g.indices, A.shape[1]
        want = _predicted(ind, tau)
        plan = ProductPlan(A, g)
        fast_reduced_product(plan)
        ok &= plan.counter.multiplies == want
        c = OpCounter()
        fast_net_product(_net_case(g, A, i), A, ind, c)
        ok &= c.multiplies == want
        layout = ReducedMCLayout(ind)
        bank = draw_bank(layout, "uniform", i)
        reduced_mc_product(bank, layout, A, c)
        ok &= c.multiplies == tau * sum(layout.sizes)
        checked += 1
    report(3, ok, f"alg1, alg4 and reduced MC tallies exact on {checked} configs")
    assert ok


def _small_lattices():
    # every b, m with N <= 64, s <= 3 and all nondecreasing w in 0..m
    rng = np.random.default_rng(4)
    for b in (2, 3, 5, 7):
        m = 1
        while b**m <= 64:
            for s in (1, 2, 3):
                for tail in itertools.combinations_with_replacement(range(m + 1), s - 1):
                    ind = ReductionIndices(b, m, (0,) + tail)
                    yield random_generating_vector(ind, rng)
            m += 1


def test_c04_korobov_closed_form_and_dual_lattice():
    g = ReducedGeneratingVector(ReductionIndices(2, 2, (0,)), (1,))
    e = sq_worst_case_error(g, KorobovParams(1, ProductWeights((1.0,))))
    ok = abs(e - math.pi**2 / 48) <= 1e-12
    H = 10**4
    n = 0
    worst = 0.0
    for g in _small_lattices():
        for alpha in (1, 2):
            p = KorobovParams(alpha, ProductWeights.geometric(0.7, g.s))
            gap = sq_worst_case_error(g, p) - dual_lattice_error(g, p, H=H)
            tail = dual_lattice_tail_bound(p, g.s, H)
            ok &= -1e-12 <= gap <= tail + 1e-12
            worst = max(worst, gap / tail if tail else 0.0)
            n += 1
    report(4, ok, f"pi^2/48 error {abs(e - math.pi**2 / 48):.1e}; {n} configs, "
                  f"max gap/tail bound = {worst:.3f}")
    assert ok


def test_c05_cbc_below_bound():
    rng = np.random.default_rng(5)
    ok = True
    tightest = 0.0
    for _ in range(20):
        m = int(rng.integers(1, 9))
        s = int(rng.integers(1, 17))
        ind = log_reduction_indices(2, m, s, 1.0)
        params = KorobovParams(1, ProductWeights.geometric(0.7, s))
        g = reduced_cbc(ind, params)
        for d in range(1, s + 1):
            e2 = sq_worst_case_error(g, params, d)
            bound = reduced_lattice_error_bound(ind, params, d, lam=1.0, form="exact")
            ok &= e2 <= bound
            tightest = max(tightest, e2 / bound)
    report(5, ok, f"20 instances, max e^2/bound = {tightest:.3f}")
    assert ok


def test_c06_local_discrepancy_bound():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    checks = violations = 0
    for _ in range(50):
        m = int(rng.integers(1, 6))
        s = int(rng.integers(1, 4))
        cap = (0, 1, 2)[:s]
        w = [0]
        for j in range(1, s):
            w.append(int(rng.integers(w[-1], cap[j] + 1)))
        ind = ReductionIndices(2, m, tuple(w))
        Chat = reduce_matrices(random_matrices(2, m, s, rng), ind)
        X = reduced_net(Chat)
        for r in range(1, ind.s_star + 1):
            for u in itertools.combinations(range(1, ind.s_star + 1), r):
                bound = local_discrepancy_bound(Chat, u, ind)
                for x in rng.random((200, s)):
                    checks += 1
                    violations += abs(local_discrepancy(X, u, x)) > bound + 1e-12
    dt = time.perf_counter() - t0
    ok = violations == 0 and dt < 120
    report(6, ok, f"{checks} checks, {violations} violations, {dt:.1f} s")
    assert ok


def test_c07_inverse_sine_identity():
    errs = {b: abs(inverse_sine_square_sum(b) - (b * b - 1) / 3) for b in (2, 3, 5, 7)}
    ok = all(e <= 1e-12 for e in errs.values())
    report(7, ok, "max error " + f"{max(errs.values()):.1e}")
    assert ok


def _lin(X):
    return X @ np.arange(1.0, X.shape[1] + 1)


def _prod(X):
    return np.prod(1.0 + X * np.arange(1, X.shape[1] + 1) / 3.0, axis=1) + X[:, 0] * X[:, -1]


def _mu_table(f, s, supports, probs):
    mu = {tail_set(k, s): mu_tail_exact(f, supports, probs, tail_set(k, s))
          for k in range(1, s + 1)}
    mu[frozenset()] = mu_tail_exact(f, supports, probs, ())
    return mu


def test_c08_variance_formula_exact():
    layouts = enumerated = 0
    worst = 0.0
    ok = True
    for m in range(1, 5):
        for s in range(1, 5):
            for tail in itertools.combinations_with_replacement(range(m + 1), s - 1):
                L = ReducedMCLayout(ReductionIndices(2, m, (0,) + tail))
                S, P = [[0.0, 1.0]] * s, [[0.5, 0.5]] * s
                layouts += 1
                for f in (_lin, _prod):
                    v = variance_formula(_mu_table(f, s, S, P), L)
                    # exact variance over every pair of rows and every support point
                    exact = pairwise_variance(f, S, P, L)
                    worst = max(worst, abs(v - exact))
                    ok &= abs(v - exact) <= 1e-12
                    # every bank realization, where that is small enough
                    if 2**sum(L.sizes) * L.N <= 2**20:
                        full = enumerate_variance(f, S, P, L)
                        worst = max(worst, abs(v - full))
                        ok &= abs(v - full) <= 1e-12
                        enumerated += 1
    report(8, ok, f"{layouts} layouts x 2 integrands, {enumerated} also by full bank "
                  f"enumeration, max diff {worst:.1e}")
    assert ok


def test_c09_unbiased():
    s, m, reps = 4, 6, 2000
    L = ReducedMCLayout(log_reduction_indices(2, m, s, 1.0))

    def f(X):
        return X[:, 0]**2 + 2 * X[:, 1] * X[:, 2] - X[:, 3] + X[:, 0] * X[:, 3]**2

    exact = 1 / 3 + 2 / 4 - 1 / 2 + 1 / 6
    # three-point Gauss-Legendre on [0, 1] is exact for the moments needed
    nodes, weights = np.polynomial.legendre.leggauss(3)
    S, P = [list((nodes + 1) / 2)] * s, [list(weights / 2)] * s
    var = variance_formula(_mu_table(f, s, S, P), L)
    est = np.array([reduced_mc_estimate(f, draw_bank(L, "uniform", [9, r]), L)
                    for r in range(reps)])
    band = 3.2905 * math.sqrt(var / reps)
    dev = abs(est.mean() - exact)
    ok = dev <= band
    report(9, ok, f"|mean - exact| = {dev:.2e} <= band {band:.2e}")
    assert ok


def test_c10_timing_and_counter_ratio():
    t0 = time.perf_counter()
    cfg = BenchConfig(sweep="s", values=(800,), m=10, s=800, tau=20, w="log:1",
                      algos=("naive", "alg1"), reps=10, seed=10)
    rows = {r.algo: r for r in run_timing_sweep(cfg)}
    ind = log_reduction_indices(2, 10, 800, 1.0)
    want = Fraction(sum(Fraction(1, 2**ind.w[j]) for j in range(ind.s_star)), 800)
    ratio = Fraction(rows["alg1"].multiplies, rows["naive"].multiplies)
    dt = time.perf_counter() - t0
    ok = ratio == want and rows["alg1"].mean_ns < rows["naive"].mean_ns and dt < 300
    report(10, ok, f"ratio {float(ratio):.5f} (expected {float(want):.5f}), "
                   f"alg1 {rows['alg1'].mean_ns / 1e6:.2f} ms < naive "
                   f"{rows['naive'].mean_ns / 1e6:.2f} ms, {dt:.1f} s")
    assert ok


def test_c11_option_pricing_convergence():
    t0 = time.perf_counter()
    ms = list(range(8, 15))
    cs = (0.0, 0.5, 1.0)
    ref = load_reference()["price"]
    rows = run_option_study(OptionModel.tridiagonal(), ms, cs, reps=64,
                            reference=ref, seed=7)
    slopes, last = {}, {}
    for c in cs:
        sel = [r for r in rows if r["c"] == c]
        slopes[c] = loglog_slope([2.0**r["m"] for r in sel], [r["mean_abs_error"] for r in sel])
        last[c] = next(r for r in sel if r["m"] == 14)
    ok = all(abs(v + 0.5) <= 0.15 for v in slopes.values())
    for a, b in itertools.combinations(cs, 2):
        ra, rb = last[a], last[b]
        ok &= abs(ra["mean"] - rb["mean"]) <= 3 * math.hypot(ra["se"], rb["se"])
    dt = time.perf_counter() - t0
    ok &= dt < 300
    report(11, ok, "slopes " + ", ".join(f"c={c:g}: {v:.3f}" for c, v in slopes.items())
           + "; m=14 means " + ", ".join(f"{last[c]['mean']:.3f}" for c in cs)
           + f", {dt:.1f} s")
    assert ok
