import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from redqmc.errors import DimensionMismatchError, InvalidParameterError
from redqmc.fastprod import (GroupedPlan, OpCounter, ProductPlan,
                             complexity_report, descending_tiled_product,
                             fast_reduced_product, naive_product,
                             optimized_fast_reduced_product, predicted_multiplies)
from redqmc.pointset import ReductionIndices, full_point_set, random_generating_vector

from .conftest import lattices


def _plan(g, seed=0, tau=3):
    A = np.random.default_rng(seed).uniform(-1, 1, size=(g.s, tau))
    return ProductPlan(A, g)


@given(lattices(), st.integers(1, 5), st.integers(0, 1000))
def test_alg1_alg2_match_naive(g, tau, seed):
    plan = _plan(g, seed, tau)
    ref = full_point_set(g) @ plan.A
    tol = 1e-12 * g.s
    np.testing.assert_allclose(fast_reduced_product(plan), ref, rtol=0, atol=tol)
    np.testing.assert_allclose(optimized_fast_reduced_product(plan), ref, rtol=0, atol=tol)


@given(lattices(), st.integers(1, 4))
def test_counters_match_prediction(g, tau):
    plan = _plan(g, 1, tau)
    pred = tau * sum(g.indices.size(j) for j in range(g.indices.s_star))
    for fn in (fast_reduced_product, optimized_fast_reduced_product):
        fn(plan)
        assert plan.counter.multiplies == pred
        assert plan.counter.adds == pred
        rep = complexity_report(plan)
        assert rep.multiplies == rep.predicted_multiplies == pred
        assert rep.peak_scalars <= rep.storage_bound
    assert predicted_multiplies(g.indices, tau) == pred


def test_naive_counter():
    c = OpCounter()
    X = np.ones((8, 3))
    A = np.ones((3, 2))
    naive_product(X, A, c)
    assert (c.multiplies, c.adds) == (48, 48)


def test_all_coordinates_beyond_s_star():
    # w_j >= m everywhere but the first: only one column contributes
    g = random_generating_vector(ReductionIndices(2, 3, (0, 3, 4)), 0)
    plan = _plan(g)
    out = fast_reduced_product(plan)
    np.testing.assert_allclose(out, full_point_set(g) @ plan.A, atol=1e-15)
    assert plan.counter.multiplies == 8 * 3


def test_s_star_zero_gives_zero_matrix():
    g = random_generating_vector(ReductionIndices(2, 2, (0,)), 0)
    g2 = random_generating_vector(ReductionIndices(2, 2, (0, 2, 2)), 0)
    for gg in (g, g2):
        plan = _plan(gg)
        assert fast_reduced_product(plan).shape == (4, 3)


def test_tiled_product_rejects_bad_sizes():
    with pytest.raises(InvalidParameterError):
        descending_tiled_product([np.ones(4), np.ones(3)], np.ones((2, 1)))


def test_tiled_product_initial_row():
    out = descending_tiled_product([np.array([0.0, 1.0])], np.array([[2.0]]), initial=[5.0])
    np.testing.assert_array_equal(out[:, 0], [5.0, 7.0])


def test_plan_shape_checks():
    g = random_generating_vector(ReductionIndices(2, 3, (0, 1)), 0)
    with pytest.raises(DimensionMismatchError):
        ProductPlan(np.ones((3, 2)), g)
    with pytest.raises(DimensionMismatchError):
        naive_product(np.ones((4, 2)), np.ones((3, 2)))


def test_grouped_plan_levels():
    ind = ReductionIndices(2, 3, (0, 0, 2, 3, 5))
    assert GroupedPlan.from_indices(ind).levels == ((0, 1), (), (2,))


def test_report_requires_a_run():
    g = random_generating_vector(ReductionIndices(2, 3, (0,)), 0)
    with pytest.raises(InvalidParameterError):
        complexity_report(_plan(g))


def test_rows_are_lattice_order():
    g = random_generating_vector(ReductionIndices(3, 3, (0, 1, 1, 2)), 4)
    plan = _plan(g, tau=2)
    out = fast_reduced_product(plan)
    zfull = g.lattice_vector()
    for k in (0, 1, 5, 26):
        x = (k * zfull % g.N) / g.N
        np.testing.assert_allclose(out[k], x @ plan.A, atol=1e-14)
