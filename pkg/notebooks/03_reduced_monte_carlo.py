"""
Reduced Monte Carlo
===================

Coordinate ``j`` reuses ``N_j = 2**(m - w_j)`` independent draws. The
variance of the estimator then depends on the tail moments ``mu_{k..s}``
only, which we can evaluate exactly for a polynomial integrand.
"""

# %%
import numpy as np

from redqmc.pointset import log_reduction_indices
from redqmc.reducedmc import (ReducedMCLayout, draw_bank, mu_tail_exact,
                              reduced_mc_estimate, tail_set, variance_formula)

s, m = 4, 8


def f(X):
    return np.prod(1.0 + (X - 0.5) / np.arange(1, X.shape[1] + 1), axis=1)


# Gauss-Legendre nodes give exact moments for low-degree polynomials
nodes, wts = np.polynomial.legendre.leggauss(3)
S, P = [list((nodes + 1) / 2)] * s, [list(wts / 2)] * s
mu = {tail_set(k, s): mu_tail_exact(f, S, P, tail_set(k, s)) for k in range(1, s + 1)}
mu[frozenset()] = mu_tail_exact(f, S, P, ())

# %%
for c in (0.0, 1.0, 2.0):
    L = ReducedMCLayout(log_reduction_indices(2, m, s, c))
    v = variance_formula(mu, L)
    est = [reduced_mc_estimate(f, draw_bank(L, "uniform", [int(c * 10), r]), L) for r in range(500)]
    print(f"c={c}: N_j={L.sizes}  formula {v:.3e}  empirical {np.var(est, ddof=1):.3e}")
