"""
Invariant suites run by the ``check`` command.

Each suite returns a ``SuiteResult`` whose checks carry the worst observed
magnitude next to the threshold it was compared with.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from src.directions import BetaFamily, BetaInputs, BetaRule, compute_beta, fr_value, raw_beta
from src.exceptions import MocgError
from src.problem import (
    JacobianMatrix,
    builtin_problem,
    catalog_names,
    check_gradients,
    constant_violations,
    evaluate,
    jacobian,
)
from src.settings import RuntimeSettings
from src.solver import SolveConfig, SolveReport, solve, zoutendijk_diag
from src.stepsize import MetricProvider, compute_delta, fixed_stepsize, wolfe_stepsize
from src.subproblem import psi, solve_subproblem, solve_subproblem_oracle

logger = logging.getLogger(__name__)

CHECK_DIMENSION = 3
RUN_PROBLEMS = (("quad-pair", 2), ("jos1", 10), ("aniso-pair", 4))
RUN_STARTS = 3


@dataclass
class CheckResult:
    name: str
    worst: float
    threshold: float
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    name: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, name: str, worst: float, threshold: float, detail: str = "") -> None:
        """Record a check that passes when ``worst <= threshold``."""
        worst = float(worst)
        passed = bool(np.isfinite(worst) and worst <= threshold)
        if not passed:
            logger.warning(f"{self.name}/{name} failed: {worst:.3e} > {threshold:.1e} {detail}")
        self.checks.append(CheckResult(name, worst, threshold, passed, detail))

    def fail(self, name: str, error: Exception) -> None:
        logger.error(f"{self.name}/{name} raised {error!r}")
        self.checks.append(CheckResult(name, np.inf, 0.0, False, str(error)))


def _violation_worst(reports: List[SolveReport], names) -> float:
    magnitudes = [
        v.magnitude for r in reports for v in r.invariant_violations if v.name in names
    ]
    return max(magnitudes, default=0.0)


def _fresh_runs(families=tuple(BetaFamily), starts: int = RUN_STARTS) -> List[SolveReport]:
    reports = []
    for name, n in RUN_PROBLEMS:
        problem = builtin_problem(name, n)
        rng = np.random.default_rng(0)
        x0s = problem.sample_points(rng, starts)
        for family in families:
            config = SolveConfig(beta_rule=BetaRule.theorem_default(family))
            reports.extend(solve(problem, x0, config) for x0 in x0s)
    return reports


def problem_suite(settings: RuntimeSettings) -> SuiteResult:
    suite = SuiteResult("problem")
    rng = np.random.default_rng(0)
    for name in catalog_names():
        try:
            problem = builtin_problem(name, CHECK_DIMENSION)
            points = problem.sample_points(rng, settings.check_points)
            worst = max(check_gradients(problem, x, settings.fd_step) for x in points)
            suite.add(f"{name}: gradients", worst, 1e-5)

            ratios = constant_violations(problem, settings.check_pairs)
            if ratios.lipschitz is not None:
                suite.add(f"{name}: lipschitz ratio", ratios.lipschitz, 1.0 + 1e-9)
            if ratios.convexity is not None:
                suite.add(f"{name}: convexity deficit", 1.0 - ratios.convexity, 1e-9)
            if problem.minimizers is not None and problem.pareto_distance is not None:
                worst = max(problem.pareto_distance(x) for x in problem.minimizers)
                suite.add(f"{name}: minimizers in Pareto set", worst, 1e-6)
        except MocgError as e:
            suite.fail(name, e)
    return suite


def _random_jacobian(rng: np.random.Generator) -> JacobianMatrix:
    m = int(rng.integers(1, 4))
    n = int(rng.integers(1, 7))
    return JacobianMatrix(rng.normal(size=(m, n)))


def subproblem_suite(settings: RuntimeSettings) -> SuiteResult:
    suite = SuiteResult("subproblem")
    rng = np.random.default_rng(1)
    closed_form = grid = kkt = theta = 0.0
    homogeneity = subadditivity = stability = 0.0
    for _ in range(settings.check_jacobians):
        J = _random_jacobian(rng)
        sol = solve_subproblem(J)
        oracle = solve_subproblem_oracle(J)
        error = float(np.max(np.abs(sol.v - oracle.v)))
        if J.m <= 2:
            closed_form = max(closed_form, error)
        else:
            grid = max(grid, error)
        norm_sq = sol.norm_v**2
        kkt = max(kkt, abs(sol.psi_v + norm_sq))
        theta = max(theta, abs(sol.theta + 0.5 * norm_sq))

        b1, b2 = rng.normal(size=(2, J.n))
        scale = float(rng.uniform(0.1, 10.0))
        homogeneity = max(homogeneity, abs(psi(J, scale * b1) - scale * psi(J, b1)))
        subadditivity = max(
            subadditivity,
            psi(J, b1 + b2) - psi(J, b1) - psi(J, b2),
            psi(J, b1) - psi(J, b2) - psi(J, b1 - b2),
        )
        other = JacobianMatrix(J.rows + rng.normal(scale=0.1, size=J.rows.shape))
        gap = abs(psi(J, b1) - psi(other, b2))
        stability = max(
            stability, gap - float(np.linalg.norm(J.directional(b1) - other.directional(b2)))
        )

    suite.add("oracle agreement m<=2", closed_form, 1e-6)
    suite.add("oracle agreement m=3", grid, 1e-2)
    suite.add("kkt identity", kkt, 1e-8)
    suite.add("theta identity", theta, 1e-8)
    suite.add("psi homogeneity", homogeneity, 1e-10)
    suite.add("psi subadditivity", subadditivity, 1e-12)
    suite.add("psi stability", stability, 1e-12)
    return suite


def stepsize_suite(settings: RuntimeSettings) -> SuiteResult:
    suite = SuiteResult("stepsize")
    suite.add("delta formula", abs(compute_delta(2.0, 4.0, 0.5) - 0.25), 0.0)

    rng = np.random.default_rng(2)
    metric = MetricProvider.fixed_diagonal([0.5, 1.0, 2.0])
    B = metric.matrix(3)
    eigenvalues = np.linalg.eigvalsh(B)
    suite.add(
        "metric bounds",
        max(metric.a_min - eigenvalues.min(), eigenvalues.max() - metric.a_max),
        0.0,
    )
    homogeneity = norm = 0.0
    for _ in range(100):
        d = rng.normal(size=3)
        norm = max(norm, abs(metric.norm_sq(d) - float(d @ B @ d)) / float(d @ d))
        psi_d = -abs(float(rng.normal()))
        scale = float(rng.uniform(0.1, 10.0))
        t = fixed_stepsize(psi_d, d, metric, 0.4)
        scaled = fixed_stepsize(scale * psi_d, scale * d, metric, 0.4)
        homogeneity = max(homogeneity, abs(scaled * scale - t) / t)
    suite.add("metric norm", norm, 1e-13)
    suite.add("stepsize homogeneity", homogeneity, 1e-12)

    problem = builtin_problem("quad-pair", 2)
    wolfe = 0.0
    for x in problem.sample_points(rng, 20):
        J = jacobian(problem, x)
        d = solve_subproblem(J).v
        t = wolfe_stepsize(problem, x, d, 1e-4, 0.1).t
        psi0 = psi(J, d)
        decrease = evaluate(problem, x + t * d) - evaluate(problem, x) - 1e-4 * t * J.directional(d)
        curvature = 0.1 * psi0 - psi(jacobian(problem, x + t * d), d)
        wolfe = max(wolfe, float(decrease.max()), curvature)
    suite.add("wolfe conditions", wolfe, 1e-12)

    reports = _fresh_runs(families=(BetaFamily.FR,))
    suite.add("rho identity", _violation_worst(reports, {"rho-identity"}), 0.0)
    suite.add(
        "rho bands",
        _violation_worst(reports, {"rho-lipschitz-band", "rho-convexity-band"}),
        0.0,
    )
    suite.add(
        "strong convexity inequality",
        _violation_worst(reports, {"strong-convexity-inequality"}),
        0.0,
    )
    return suite


def directions_suite(settings: RuntimeSettings) -> SuiteResult:
    suite = SuiteResult("directions")
    rng = np.random.default_rng(3)
    reduction = cap = 0.0
    rule = BetaRule(BetaFamily.PRP, fr_cap_xi=0.9)
    for _ in range(200):
        g_k, g_km1 = rng.normal(size=(2, 4))
        inputs = BetaInputs(
            psi_k_vk=-float(g_k @ g_k),
            psi_km1_vkm1=-float(g_km1 @ g_km1),
            psi_km1_dkm1=-float(g_km1 @ g_km1),
            psi_k_dkm1=-float(g_k @ g_km1),
            psi_km1_vk=-float(g_km1 @ g_k),
        )
        fr = (g_k @ g_k) / (g_km1 @ g_km1)
        prp = g_k @ (g_k - g_km1) / (g_km1 @ g_km1)
        reduction = max(
            reduction,
            abs(raw_beta(BetaFamily.FR, inputs) - fr) / max(1.0, fr),
            abs(raw_beta(BetaFamily.PRP, inputs) - prp) / max(1.0, abs(prp)),
        )
        cap = max(cap, abs(compute_beta(rule, inputs)) - 0.9 * fr_value(inputs))
    suite.add("single objective reduction", reduction, 1e-12)
    suite.add("fr cap", cap, 1e-12)

    reports = _fresh_runs(families=(BetaFamily.CD, BetaFamily.DY))
    suite.add("cd descent bound", _violation_worst(reports, {"cd-descent-bound"}), 0.0)
    suite.add(
        "dy descent bound",
        _violation_worst(reports, {"dy-descent-bound", "dy-denominator"}),
        0.0,
    )
    return suite


def solver_suite(settings: RuntimeSettings) -> SuiteResult:
    suite = SuiteResult("solver")
    reports = _fresh_runs()
    suite.add("monotone decrease", _violation_worst(reports, {"monotone-decrease"}), 0.0)
    unconverged = sum(r.min_norm_v is None or r.min_norm_v > 1e-6 for r in reports)
    suite.add("min norm v reaches 1e-6", unconverged, 0, f"{unconverged} of {len(reports)} runs")
    decreases = 0.0
    for report in reports:
        if report.records:
            partial_sums = zoutendijk_diag(report.records).partial_sums
            decreases = max(decreases, float(np.max(-np.diff(partial_sums), initial=0.0)))
    suite.add("zoutendijk sums nondecreasing", decreases, 0.0)
    return suite


SUITES: Dict[str, Callable[[RuntimeSettings], SuiteResult]] = {
    "problem": problem_suite,
    "subproblem": subproblem_suite,
    "stepsize": stepsize_suite,
    "directions": directions_suite,
    "solver": solver_suite,
}


def run_checks(
    scope: str = "all", settings: Optional[RuntimeSettings] = None
) -> List[SuiteResult]:
    """Run every suite, or only the one named by ``scope``."""
    settings = settings or RuntimeSettings()
    if scope != "all" and scope not in SUITES:
        raise ValueError(f"Unknown check scope {scope!r}, valid: all, {', '.join(SUITES)}")
    names = list(SUITES) if scope == "all" else [scope]
    results = []
    for name in names:
        logger.info(f"Running {name} suite")
        results.append(SUITES[name](settings))
    return results
