"""
Reduced digital nets
====================

Zeroing the last ``w_j`` rows of each generating matrix puts coordinate
``j`` on a grid of step ``2**(w_j - m)``. We look at the resulting points,
their t-values, and the weighted discrepancy bound for a choice of ``w``
driven by the weights.
"""

# %%
import numpy as np

from redqmc.cbc import ProductWeights
from redqmc.digitalnet import (choose_w, discrepancy_bound_terms, random_matrices,
                               reduce_matrices, reduced_net, t_value_table,
                               weighted_star_discrepancy)

# %%
b, m, s = 2, 6, 4
weights = ProductWeights.geometric(0.5, s)
w = choose_w(weights, b, m, s, kappa=2.0)
print("w =", w.w)

# %%
C = random_matrices(b, m, s, np.random.default_rng(1), invertible=True)
Chat = reduce_matrices(C, w)
X = reduced_net(Chat)
for j in range(s):
    print(f"coordinate {j + 1}: {len(np.unique(X[:, j]))} distinct values")

# %%
# t-values of every projection, then the two terms of the bound.
table = t_value_table(Chat, range(1, w.s_star + 1))
for u, t in sorted(table.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
    print(sorted(u), t)
first, second = discrepancy_bound_terms(Chat, w, weights, table)
print(f"bound terms: {first:.4f} + {second:.4f}")

# %%
# For a net this small the exact weighted star discrepancy is computable.
print(f"exact: {weighted_star_discrepancy(X[:, :3], weights):.4f} (first three coordinates)")
