import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.exceptions import CatalogError, DimensionMismatchError, EvaluationError
from src.problem import (
    JacobianMatrix,
    ObjectiveProblem,
    builtin_problem,
    catalog_names,
    check_gradients,
    constant_violations,
    evaluate,
    jacobian,
    register_problem,
    unregister_problem,
)


@pytest.fixture()
def quad_pair():
    return builtin_problem("quad-pair", 2)


@pytest.fixture()
def broken_problem():
    """Quadratic whose declared gradient is off by a constant."""
    return ObjectiveProblem(
        name="broken",
        n=2,
        m=1,
        objective=lambda x: np.array([0.5 * x @ x]),
        gradient=lambda x: (x + 0.1)[np.newaxis, :],
    )


class TestEvaluate:
    """Objective and Jacobian evaluation on the catalog problems."""

    def test_quad_pair_at_origin(self, quad_pair):
        assert_allclose(evaluate(quad_pair, [0.0, 0.0]), [0.5, 0.5])

    def test_quad_pair_at_first_center(self, quad_pair):
        assert_allclose(evaluate(quad_pair, [1.0, 0.0]), [0.0, 2.0])

    def test_jos1_values(self):
        problem = builtin_problem("jos1", 2)
        assert_allclose(evaluate(problem, [1.0, 1.0]), [1.0, 1.0])

    def test_jacobian_rows(self, quad_pair):
        assert_array_equal(jacobian(quad_pair, [0.0, 0.0]).rows, [[-1.0, 0.0], [1.0, 0.0]])
        assert_array_equal(jacobian(quad_pair, [1.0, 0.0]).rows, [[0.0, 0.0], [2.0, 0.0]])

    def test_wrong_dimension_rejected(self, quad_pair):
        with pytest.raises(DimensionMismatchError):
            evaluate(quad_pair, [0.0, 0.0, 0.0])

    def test_non_finite_objective_reports_index(self):
        problem = ObjectiveProblem(
            name="nan",
            n=1,
            m=2,
            objective=lambda x: np.array([x[0], np.nan]),
            gradient=lambda x: np.ones((2, 1)),
        )
        with pytest.raises(EvaluationError) as excinfo:
            evaluate(problem, [1.0])
        assert excinfo.value.index == 1

    def test_jacobian_matrix_is_read_only(self):
        J = JacobianMatrix([[1.0, 2.0]])
        with pytest.raises(ValueError):
            J.rows[0, 0] = 5.0


class TestGradientChecks:
    """Central difference agreement and sampled constants."""

    @pytest.mark.parametrize("name", catalog_names())
    def test_catalog_gradients_match_finite_differences(self, name):
        problem = builtin_problem(name, 3)
        rng = np.random.default_rng(0)
        for x in problem.sample_points(rng, 100):
            assert check_gradients(problem, x) <= 1e-5

    def test_quadratic_error_is_roundoff(self, quad_pair):
        assert check_gradients(quad_pair, [0.3, -0.7], 1e-5) <= 1e-6

    def test_broken_gradient_detected(self, broken_problem):
        assert check_gradients(broken_problem, [0.2, 0.4]) > 1e-2

    def test_step_must_be_positive(self, quad_pair):
        with pytest.raises(ValueError):
            check_gradients(quad_pair, [0.0, 0.0], h=0.0)

    @pytest.mark.parametrize("name", catalog_names())
    def test_declared_constants_hold(self, name):
        ratios = constant_violations(builtin_problem(name, 3), pairs=1000)
        if ratios.lipschitz is not None:
            assert ratios.lipschitz <= 1.0 + 1e-9
        if ratios.convexity is not None:
            assert ratios.convexity >= 1.0 - 1e-9


class TestCatalog:
    """Catalog construction and registry."""

    def test_quad_pair_constants_and_pareto_set(self, quad_pair):
        assert quad_pair.lipschitz == 1.0
        assert quad_pair.convexity == 1.0
        assert quad_pair.known_pareto_set([0.3, 0.0])
        assert quad_pair.known_pareto_set([-1.0, 0.0])
        assert not quad_pair.known_pareto_set([0.0, 0.1])
        assert not quad_pair.known_pareto_set([1.5, 0.0])

    def test_jos1_constants(self):
        problem = builtin_problem("jos1", 5)
        assert_allclose(problem.lipschitz_constants, [0.4, 0.4])
        assert_allclose(problem.convexity_constants, [0.4, 0.4])

    def test_aniso_pair_has_distinct_constants(self):
        problem = builtin_problem("aniso-pair", 4)
        assert problem.lipschitz == 4.0
        assert problem.convexity == 1.0

    def test_huber_pair_is_exploratory(self):
        problem = builtin_problem("huber-pair", 2)
        assert problem.exploratory
        assert problem.convexity is None

    @pytest.mark.parametrize("name", catalog_names())
    def test_single_objective_minimizers_are_pareto(self, name):
        problem = builtin_problem(name, 3)
        for x in problem.minimizers:
            assert problem.known_pareto_set(x)

    def test_unknown_name_lists_valid_names(self):
        with pytest.raises(CatalogError) as excinfo:
            builtin_problem("zdt1", 2)
        assert "quad-pair" in str(excinfo.value)

    @pytest.mark.parametrize("n", [0, -1, 2.5])
    def test_degenerate_dimension_rejected(self, n):
        with pytest.raises(CatalogError):
            builtin_problem("quad-pair", n)

    def test_register_and_unregister(self, broken_problem):
        register_problem("broken", lambda n: broken_problem)
        try:
            assert "broken" in catalog_names()
            with pytest.raises(CatalogError):
                register_problem("broken", lambda n: broken_problem)
        finally:
            unregister_problem("broken")
        assert "broken" not in catalog_names()
