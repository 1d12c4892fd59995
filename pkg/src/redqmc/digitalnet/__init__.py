"""Reduced digital nets and their discrepancy bounds."""

from .bounds import (DUAL_CAP, character_sum, choose_w, discrepancy_bound,
                     discrepancy_bound_terms, dual_net, inverse_sine_square_sum,
                     local_discrepancy, local_discrepancy_bound, r_w, rho, walsh,
                     weighted_star_discrepancy)
from .nets import (GeneratingMatrixSet, digital_point, fast_net_product, gf_rank,
                   identity_matrices, index_digits, random_matrices,
                   reduce_matrices, reduced_net, reduced_net_numerators,
                   subset_coords, t_value_table, verify_t_value)

__all__ = [
    "DUAL_CAP", "GeneratingMatrixSet", "character_sum", "choose_w",
    "digital_point", "discrepancy_bound", "discrepancy_bound_terms", "dual_net",
    "fast_net_product", "gf_rank", "identity_matrices", "index_digits",
    "inverse_sine_square_sum", "local_discrepancy", "local_discrepancy_bound",
    "r_w", "random_matrices", "reduce_matrices", "reduced_net",
    "reduced_net_numerators", "rho", "subset_coords", "t_value_table",
    "verify_t_value", "walsh", "weighted_star_discrepancy",
]
