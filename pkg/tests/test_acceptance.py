"""End-to-end properties of fixed stepsize runs on the strongly convex catalog."""

import numpy as np
import pytest

from src.checks import run_checks
from src.directions import BetaFamily, BetaRule
from src.problem import builtin_problem, jacobian
from src.settings import RuntimeSettings
from src.solver import SolveConfig, SolveStatus, StepsizeMode, solve, zoutendijk_diag
from src.subproblem import psi

PROBLEMS = [("quad-pair", 2), ("jos1", 10)]


def seeded_runs(name, n, family, starts=20):
    problem = builtin_problem(name, n)
    config = SolveConfig(beta_rule=BetaRule.theorem_default(family), max_iters=2000)
    x0s = problem.sample_points(np.random.default_rng(2024), starts)
    return problem, [solve(problem, x0, config) for x0 in x0s]


@pytest.fixture(scope="module", params=[(p, f) for p in PROBLEMS for f in BetaFamily])
def family_runs(request):
    (name, n), family = request.param
    return (family,) + seeded_runs(name, n, family)


class TestConvergentFamilies:
    """Every beta family with its convergence modifier."""

    def test_min_norm_v_reaches_tolerance(self, family_runs):
        _, _, reports = family_runs
        assert all(r.min_norm_v <= 1e-6 for r in reports)

    def test_no_invariant_violations(self, family_runs):
        _, _, reports = family_runs
        assert [v for r in reports for v in r.invariant_violations] == []

    def test_monotone_decrease(self, family_runs):
        _, _, reports = family_runs
        for report in reports:
            objectives = np.array([r.objectives for r in report.records])
            assert np.all(np.diff(objectives, axis=0) <= 1e-12)

    def test_zoutendijk_sums_nondecreasing(self, family_runs):
        _, _, reports = family_runs
        for report in reports:
            assert zoutendijk_diag(report.records).nondecreasing

    def test_rho_within_bands(self, family_runs):
        _, problem, reports = family_runs
        for report in reports:
            ratio = report.lipschitz * report.delta
            for record in report.records:
                if record.rho is None:
                    continue
                assert 1 - ratio - 1e-8 <= record.rho <= 1 + ratio + 1e-8
                assert 0 < record.rho <= report.convexity_c + 1e-8


class TestQuadPairStep:
    def test_rho_is_one_tenth(self):
        _, reports = seeded_runs("quad-pair", 2, BetaFamily.FR, starts=5)
        for report in reports:
            for record in report.records[:-1]:
                assert record.rho == pytest.approx(0.1, abs=1e-8)

    def test_step_identity_recomputed(self):
        problem = builtin_problem("quad-pair", 2)
        report = solve(problem, [6.0, 3.0])
        records = report.records
        for before, after in zip(records, records[1:]):
            d = (after.x - before.x) / before.t
            lhs = psi(jacobian(problem, after.x), d)
            assert abs(lhs - before.rho * before.psi_d) <= 1e-10 * max(1.0, abs(before.psi_d))


class TestEvaluationCounts:
    @pytest.mark.parametrize("name, n", PROBLEMS)
    def test_fixed_versus_wolfe(self, name, n):
        problem = builtin_problem(name, n)
        x0 = problem.sample_points(np.random.default_rng(1), 1)[0]
        fixed = solve(problem, x0, SolveConfig())
        wolfe = solve(problem, x0, SolveConfig(stepsize_mode=StepsizeMode.WOLFE))
        assert fixed.status == wolfe.status == SolveStatus.CONVERGED
        assert fixed.stepsize_func_evals == 0
        assert fixed.jac_evals == fixed.iterations + 1
        assert wolfe.stepsize_func_evals >= wolfe.iterations
        assert wolfe.func_evals == 1 + wolfe.stepsize_func_evals
        assert wolfe.jac_evals == 1 + wolfe.stepsize_jac_evals


def test_all_suites_pass():
    settings = RuntimeSettings(check_points=20, check_pairs=200, check_jacobians=150)
    results = run_checks("all", settings)
    failed = [(s.name, c.name, c.worst) for s in results for c in s.checks if not c.passed]
    assert failed == []
