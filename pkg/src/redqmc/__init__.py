"""Reduced lattice rules, reduced digital nets and reduced Monte Carlo.

Reducing coordinate ``j`` to ``b**(m - w_j)`` distinct values lets the
product ``X A`` of an ``N x s`` point matrix with an ``s x tau`` matrix be
computed in ``O(tau * sum_j b**(m - w_j))`` multiplications instead of
``O(N s tau)``.
"""

__version__ = "0.1.0"

from .cbc import (KorobovParams, ProductWeights, dual_lattice_error,
                  korobov_kernel, reduced_cbc, reduced_lattice_error_bound,
                  sq_worst_case_error)
from .errors import (CapExceededError, DimensionMismatchError, FactorizationError,
                     InvalidParameterError, MissingEntryError, NumericDomainError,
                     ParseError, ReducedQMCError, UnsupportedParameterError)
from .fastprod import (GroupedPlan, OpCounter, ProductPlan, complexity_report,
                       fast_reduced_product, naive_product,
                       optimized_fast_reduced_product)
from .pointset import (ReducedGeneratingVector, ReductionIndices,
                       full_point_set, log_reduction_indices,
                       random_generating_vector, reduced_column)
from .reducedmc import (ReducedMCLayout, draw_bank, reduced_mc_product,
                        variance_formula)
from .transforms import ComponentTransform, normal_quantile, shifted_product

__all__ = [
    "CapExceededError", "ComponentTransform", "DimensionMismatchError",
    "FactorizationError", "GroupedPlan", "InvalidParameterError",
    "KorobovParams", "MissingEntryError", "NumericDomainError", "OpCounter",
    "ParseError", "ProductPlan", "ProductWeights", "ReducedGeneratingVector",
    "ReducedMCLayout", "ReducedQMCError", "ReductionIndices",
    "UnsupportedParameterError", "complexity_report", "draw_bank",
    "dual_lattice_error", "fast_reduced_product", "full_point_set",
    "korobov_kernel", "log_reduction_indices", "naive_product",
    "normal_quantile", "optimized_fast_reduced_product",
    "random_generating_vector", "reduced_cbc", "reduced_column",
    "reduced_lattice_error_bound", "reduced_mc_product", "shifted_product",
    "sq_worst_case_error", "variance_formula",
]
