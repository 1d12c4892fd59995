"""
Reduced lattice rules and fast products
=======================================

A rank-1 lattice with reduction indices ``w`` has only ``2**(m - w_j)``
distinct values in coordinate ``j``. Here we build one by the reduced CBC
search, compare its error to the a priori bound, and time the product of
the point set with a dense matrix.
"""

# %%
import time

import numpy as np

from redqmc.cbc import (KorobovParams, ProductWeights, reduced_cbc,
                        reduced_lattice_error_bound, sq_worst_case_error)
from redqmc.fastprod import (ProductPlan, complexity_report, fast_reduced_product,
                             naive_product, optimized_fast_reduced_product)
from redqmc.pointset import full_point_set, log_reduction_indices

# %%
# Reduction indices growing like log2(j), product weights 0.7**j.
m, s = 10, 64
ind = log_reduction_indices(2, m, s, 1.0)
params = KorobovParams(1, ProductWeights.geometric(0.7, s))
g = reduced_cbc(ind, params)
print("w[:12] =", ind.w[:12])
print("z[:12] =", g.z[:12])

# %%
# Squared worst-case error against the bound, for growing dimension.
for d in (1, 2, 4, 8, 16, 32, 64):
    e2 = sq_worst_case_error(g, params, d)
    bound = reduced_lattice_error_bound(ind, params, d, form="exact")
    print(f"d={d:3d}  e^2={e2:.3e}  bound={bound:.3e}")

# %%
# The product X A. The fast versions only touch the distinct values.
A = np.random.default_rng(0).uniform(-1, 1, size=(s, 20))
X = full_point_set(g)
ref = naive_product(X, A)
for name, fn in (("alg1", fast_reduced_product), ("alg2", optimized_fast_reduced_product)):
    plan = ProductPlan(A, g)
    t0 = time.perf_counter()
    out = fn(plan)
    dt = time.perf_counter() - t0
    rep = complexity_report(plan)
    print(f"{name}: {dt * 1e3:.2f} ms, multiplies {rep.multiplies} "
          f"(naive {X.size * A.shape[1]}), max diff {np.abs(out - ref).max():.1e}")
