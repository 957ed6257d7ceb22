"""
Iteration driver for the line-search-free multiobjective CG method.

x^{k+1} = x^k + t_k d^k with d^k from ``src.directions`` and t_k from the
fixed stepsize rule (or a Wolfe search in the baseline modes). Every step is
checked against the identities and bounds the method guarantees; failures are
collected as invariant violations instead of aborting the run.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import dask
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.directions import (
    BetaFamily,
    BetaInputs,
    BetaRule,
    GuardDecision,
    GuardPolicy,
    compute_beta,
    default_dy_eta,
    descent_guard,
    dy_eta_bound,
    update_direction,
)
from src.exceptions import (
    ContractViolationError,
    DimensionMismatchError,
    DomainExitError,
    EvaluationError,
    LineSearchError,
    MocgError,
    SolverError,
)
from src.problem import JacobianMatrix, ObjectiveProblem, evaluate, jacobian
from src.stepsize import (
    DEFAULT_RHO1,
    DEFAULT_RHO2,
    DEFAULT_SAFETY,
    MetricProvider,
    StepsizeRule,
    estimate_lipschitz,
    fixed_stepsize,
    rho_diagnostic,
    wolfe_stepsize,
)
from src.subproblem import SubproblemSolution, is_pareto_critical, psi, solve_subproblem

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-10
BAND_TOL = 1e-8
MONOTONE_TOL = 1e-12
DESCENT_BOUND_TOL = 1e-10


class StepsizeMode(str, Enum):
    FIXED = "fixed"
    WOLFE = "wolfe"
    STRONG_WOLFE = "strong-wolfe"


class SolveStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max-iters"
    DEGENERATE = "degenerate"
    ERROR = "error"


class SolveConfig(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    beta_rule: BetaRule = Field(
        default_factory=lambda: BetaRule.theorem_default(BetaFamily.FR)
    )
    metric: MetricProvider = Field(default_factory=MetricProvider.identity)
    safety: float = Field(default=DEFAULT_SAFETY, gt=0, lt=1)
    tolerance: float = Field(default=1e-6, gt=0, description="Threshold on ||v(x^k)||")
    max_iters: int = Field(default=2000, ge=1)
    stepsize_mode: StepsizeMode = StepsizeMode.FIXED
    record_every: int = Field(default=1, ge=1, description="Keep every n-th record")
    rho1: float = Field(default=DEFAULT_RHO1, gt=0, lt=1)
    rho2: float = Field(default=DEFAULT_RHO2, gt=0, lt=1)
    guard: GuardPolicy = GuardPolicy.RESTART
    lipschitz: Optional[float] = Field(
        default=None, gt=0, description="Overrides the problem's declared L"
    )
    enforce_domain: bool = True

    @model_validator(mode="after")
    def check_wolfe_constants(self) -> "SolveConfig":
        if not self.rho1 < self.rho2:
            raise ValueError(f"Need rho1 < rho2, got rho1={self.rho1}, rho2={self.rho2}")
        return self


@dataclass(frozen=True)
class IterationRecord:
    """
    One recorded iterate. Step fields (psi_d onwards) are None on the
    terminal record of a converged run.
    """

    k: int
    x: np.ndarray
    objectives: np.ndarray
    norm_v: float
    theta: float
    psi_v: float
    psi_d: Optional[float]
    beta: Optional[float]
    t: Optional[float]
    rho: Optional[float]
    eta: Optional[float]
    tau: Optional[float]
    norm_d: Optional[float]
    zoutendijk_partial: float
    psi_v_partial: float
    restarted: bool
    func_evals: int
    jac_evals: int

    def as_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"k": self.k}
        row.update({f"x_{i}": value for i, value in enumerate(self.x)})
        row.update({f"F_{i}": value for i, value in enumerate(self.objectives)})
        row.update(
            norm_v=self.norm_v,
            theta=self.theta,
            psi_d=self.psi_d,
            beta=self.beta,
            t=self.t,
            rho=self.rho,
            eta=self.eta,
            tau=self.tau,
            zoutendijk_partial=self.zoutendijk_partial,
            restarted=int(self.restarted),
            func_evals=self.func_evals,
            jac_evals=self.jac_evals,
        )
        return row


def trajectory_columns(n: int, m: int) -> List[str]:
    """Stable CSV column order of ``IterationRecord.as_row``."""
    return (
        ["k"]
        + [f"x_{i}" for i in range(n)]
        + [f"F_{i}" for i in range(m)]
        + [
            "norm_v",
            "theta",
            "psi_d",
            "beta",
            "t",
            "rho",
            "eta",
            "tau",
            "zoutendijk_partial",
            "restarted",
            "func_evals",
            "jac_evals",
        ]
    )


class InvariantViolation(NamedTuple):
    iteration: int
    name: str
    magnitude: float


@dataclass
class SolveReport:
    problem: str
    status: SolveStatus
    final_x: np.ndarray
    final_objectives: Optional[np.ndarray]
    iterations: int
    records: List[IterationRecord] = field(default_factory=list)
    invariant_violations: List[InvariantViolation] = field(default_factory=list)
    restarts: int = 0
    final_norm_v: Optional[float] = None
    final_theta: Optional[float] = None
    min_norm_v: Optional[float] = None
    delta: Optional[float] = None
    lipschitz: Optional[float] = None
    lipschitz_estimated: bool = False
    convexity_c: Optional[float] = None
    beta_rule: Dict[str, Any] = field(default_factory=dict)
    stepsize_mode: str = StepsizeMode.FIXED.value
    func_evals: int = 0
    jac_evals: int = 0
    stepsize_func_evals: int = 0
    stepsize_jac_evals: int = 0
    message: str = ""
    warnings: List[str] = field(default_factory=list)

    @classmethod
    def failed(cls, problem: ObjectiveProblem, x0, message: str) -> "SolveReport":
        return cls(
            problem=problem.name,
            status=SolveStatus.ERROR,
            final_x=np.asarray(x0, dtype=float),
            final_objectives=None,
            iterations=0,
            message=message,
        )

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready summary; records are emitted separately as CSV."""

        def as_list(values):
            return None if values is None else [float(v) for v in values]

        return {
            "problem": self.problem,
            "status": self.status.value,
            "message": self.message,
            "iterations": self.iterations,
            "final_x": as_list(self.final_x),
            "final_objectives": as_list(self.final_objectives),
            "final_norm_v": self.final_norm_v,
            "final_theta": self.final_theta,
            "min_norm_v": self.min_norm_v,
            "restarts": self.restarts,
            "delta": self.delta,
            "lipschitz": self.lipschitz,
            "lipschitz_estimated": self.lipschitz_estimated,
            "convexity_c": self.convexity_c,
            "beta_rule": self.beta_rule,
            "stepsize_mode": self.stepsize_mode,
            "func_evals": self.func_evals,
            "jac_evals": self.jac_evals,
            "stepsize_func_evals": self.stepsize_func_evals,
            "stepsize_jac_evals": self.stepsize_jac_evals,
            "invariant_violations": [v._asdict() for v in self.invariant_violations],
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class StepParameters:
    """Per-problem constants shared by every run of one configuration."""

    rule: StepsizeRule
    beta_rule: BetaRule
    convexity_c: Optional[float]
    warnings: Tuple[str, ...] = ()

    @classmethod
    def resolve(cls, problem: ObjectiveProblem, config: SolveConfig) -> "StepParameters":
        config.metric.check_dimension(problem.n)
        warnings: List[str] = []
        lipschitz = config.lipschitz or problem.lipschitz
        estimated = lipschitz is None
        if estimated:
            lipschitz = estimate_lipschitz(problem)
            warnings.append(f"L not declared for {problem.name}, estimated as {lipschitz:.6g}")
        rule = StepsizeRule.build(config.metric, lipschitz, config.safety, estimated)

        mu = problem.convexity
        c = None if mu is None else 1.0 - mu * rule.delta / config.metric.a_max

        beta_rule = config.beta_rule
        if beta_rule.family == BetaFamily.DY:
            if beta_rule.dy_scale_eta is None:
                if c is None:
                    warnings.append("No convexity constant, DY scale set to eta=0")
                beta_rule = beta_rule.with_dy_eta(default_dy_eta(c))
            elif c is not None and beta_rule.dy_scale_eta >= dy_eta_bound(c):
                raise ContractViolationError(
                    f"DY scale {beta_rule.dy_scale_eta} is outside [0, {dy_eta_bound(c):.6g}) "
                    f"for {problem.name} with c={c:.6g}"
                )
        return cls(rule=rule, beta_rule=beta_rule, convexity_c=c, warnings=tuple(warnings))


class EvaluationCounter:
    """Counts objective and Jacobian evaluations of one run."""

    def __init__(self, problem: ObjectiveProblem):
        self.problem = problem
        self.func_evals = 0
        self.jac_evals = 0
        self.stepsize_func_evals = 0
        self.stepsize_jac_evals = 0

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        self.func_evals += 1
        return evaluate(self.problem, x)

    def jacobian(self, x: np.ndarray) -> JacobianMatrix:
        self.jac_evals += 1
        return jacobian(self.problem, x)

    def add_line_search(self, func_evals: int, jac_evals: int) -> None:
        self.func_evals += func_evals
        self.stepsize_func_evals += func_evals
        self.jac_evals += jac_evals
        self.stepsize_jac_evals += jac_evals


class _Previous(NamedTuple):
    J: JacobianMatrix
    psi_v: float
    psi_d: float
    rho: float
    d: np.ndarray


class ConjugateGradientSolver:
    """
    Runs one solve of ``problem`` under ``config``.

    Parameters
    ----------
    problem : ObjectiveProblem
        Problem to solve.
    config : SolveConfig
        Beta rule, metric, stepsize mode and stopping parameters.
    params : StepParameters, optional
        Pre-resolved constants; resolved from ``problem`` and ``config`` when
        omitted.
    """

    def __init__(
        self,
        problem: ObjectiveProblem,
        config: SolveConfig,
        params: Optional[StepParameters] = None,
    ):
        self.problem = problem
        self.config = config
        self.params = params or StepParameters.resolve(problem, config)
        self.violations: List[InvariantViolation] = []

    @property
    def fixed_mode(self) -> bool:
        return self.config.stepsize_mode == StepsizeMode.FIXED

    def _flag(self, k: int, name: str, magnitude: float) -> None:
        logger.warning(f"{self.problem.name}: invariant {name} violated at {k=} by {magnitude:.3e}")
        self.violations.append(InvariantViolation(k, name, float(magnitude)))

    def _direction(
        self, k: int, J: JacobianMatrix, sol: SubproblemSolution, prev: Optional[_Previous]
    ) -> Tuple[np.ndarray, float, float, bool]:
        """d^k, psi(x^k, d^k), beta_k and whether the step restarted."""
        if prev is None:
            return sol.v.copy(), sol.psi_v, 0.0, False

        psi_k_dkm1 = psi(J, prev.d)
        inputs = BetaInputs(
            psi_k_vk=sol.psi_v,
            psi_km1_vkm1=prev.psi_v,
            psi_km1_dkm1=prev.psi_d,
            psi_k_dkm1=psi_k_dkm1,
            psi_km1_vk=psi(prev.J, sol.v),
        )
        rule = self.params.beta_rule
        beta = compute_beta(rule, inputs)
        d = update_direction(sol.v, beta, prev.d, k)
        psi_d = psi(J, d)
        restarted = beta == 0.0
        if not restarted and descent_guard(psi_d, sol.psi_v, self.config.guard) == GuardDecision.RESTART:
            logger.debug(f"Descent guard restart at {k=} ({psi_d=})")
            d, psi_d, beta, restarted = sol.v.copy(), sol.psi_v, 0.0, True

        scale = max(1.0, abs(sol.psi_v))
        if rule.family == BetaFamily.CD and rule.fr_cap_xi is None and not restarted:
            excess = psi_d - (1.0 + prev.rho) * sol.psi_v
            if excess > DESCENT_BOUND_TOL * scale:
                self._flag(k, "cd-descent-bound", excess)
        c = self.params.convexity_c
        if rule.family == BetaFamily.DY and c is not None and self.fixed_mode:
            excess = psi_d - sol.psi_v / (1.0 + c)
            if excess > DESCENT_BOUND_TOL * scale:
                self._flag(k, "dy-descent-bound", excess)
            curvature = psi_k_dkm1 - prev.psi_d
            if curvature <= 0:
                self._flag(k, "dy-denominator", -curvature)
        return d, psi_d, beta, restarted

    def _check_step(self, k, F, F_new, J, J_new, diag, step_norm) -> None:
        if diag.residual > IDENTITY_TOL:
            self._flag(k, "rho-identity", diag.residual)
        # eta is a difference quotient over ||s||^2, its rounding error grows like eps |g| / ||s||
        scale = max(1.0, float(np.abs(J.rows).max()), float(np.abs(J_new.rows).max()))
        eta_slack = 4 * np.finfo(float).eps * scale / step_norm if step_norm > 0 else 0.0
        mu = self.problem.convexity
        if mu is not None and diag.t != 0.0 and diag.eta < mu - BAND_TOL - eta_slack:
            self._flag(k, "strong-convexity-inequality", mu - diag.eta)
        if not self.fixed_mode:
            return
        increase = float(np.max(F_new - F))
        if increase > MONOTONE_TOL:
            self._flag(k, "monotone-decrease", increase)
        rule = self.params.rule
        band_tol = BAND_TOL + rule.delta / rule.a_min * eta_slack
        outside = max(diag.rho - (1 + rule.ratio), (1 - rule.ratio) - diag.rho)
        if outside > band_tol:
            self._flag(k, "rho-lipschitz-band", outside)
        c = self.params.convexity_c
        if c is not None:
            if diag.rho <= 0.0:
                # open at zero: rho = 0 is already outside
                self._flag(k, "rho-convexity-band", max(-diag.rho, np.finfo(float).eps))
            elif diag.rho - c > band_tol:
                self._flag(k, "rho-convexity-band", diag.rho - c)

    def _report(self, status, x, F, sol, k, records, restarts, counter, min_norm_v, message=""):
        if message:
            logger.warning(f"{self.problem.name}: {status.value} at {k=}: {message}")
        return SolveReport(
            problem=self.problem.name,
            status=status,
            final_x=x,
            final_objectives=F,
            iterations=k,
            records=records,
            invariant_violations=list(self.violations),
            restarts=restarts,
            final_norm_v=None if sol is None else sol.norm_v,
            final_theta=None if sol is None else sol.theta,
            min_norm_v=min_norm_v,
            delta=self.params.rule.delta,
            lipschitz=self.params.rule.lipschitz,
            lipschitz_estimated=self.params.rule.lipschitz_estimated,
            convexity_c=self.params.convexity_c,
            beta_rule=self.params.beta_rule.describe(),
            stepsize_mode=self.config.stepsize_mode.value,
            func_evals=counter.func_evals,
            jac_evals=counter.jac_evals,
            stepsize_func_evals=counter.stepsize_func_evals,
            stepsize_jac_evals=counter.stepsize_jac_evals,
            message=message,
            warnings=list(self.params.warnings),
        )

    def solve(self, x0) -> SolveReport:
        problem, config = self.problem, self.config
        x = np.asarray(x0, dtype=float)
        if x.shape != (problem.n,):
            raise DimensionMismatchError(f"x0 of shape {x.shape} does not match n={problem.n}")
        if config.enforce_domain and not problem.in_domain(x):
            raise DomainExitError(f"x0={x.tolist()} is outside the box {problem.bounds}")

        self.violations = []
        counter = EvaluationCounter(problem)
        metric = config.metric
        delta = self.params.rule.delta
        logger.info(
            f"Solving {problem.name} (n={problem.n}, m={problem.m}) with "
            f"{self.params.beta_rule.family.value}, mode={config.stepsize_mode.value}, {delta=:.6g}"
        )
        try:
            F = counter.evaluate(x)
            J = counter.jacobian(x)
        except EvaluationError as e:
            return self._report(SolveStatus.ERROR, x, None, None, 0, [], 0, counter, None, str(e))
        sol = solve_subproblem(J)

        records: List[IterationRecord] = []
        prev: Optional[_Previous] = None
        zoutendijk = psi_v_sum = 0.0
        restarts = 0
        min_norm_v = sol.norm_v
        k = 0

        def finish(status, message=""):
            return self._report(
                status, x, F, sol, k, records, restarts, counter, min_norm_v, message
            )

        while True:
            if is_pareto_critical(sol, config.tolerance):
                records.append(
                    IterationRecord(
                        k=k, x=x, objectives=F, norm_v=sol.norm_v, theta=sol.theta,
                        psi_v=sol.psi_v, psi_d=None, beta=None, t=None, rho=None,
                        eta=None, tau=None, norm_d=None, zoutendijk_partial=zoutendijk,
                        psi_v_partial=psi_v_sum, restarted=False,
                        func_evals=counter.func_evals, jac_evals=counter.jac_evals,
                    )
                )
                logger.info(f"{problem.name}: converged at {k=} with ||v||={sol.norm_v:.3e}")
                return finish(SolveStatus.CONVERGED)
            if k >= config.max_iters:
                logger.info(f"{problem.name}: reached max_iters={config.max_iters}")
                return finish(SolveStatus.MAX_ITERS)

            d, psi_d, beta, restarted = self._direction(k, J, sol, prev)
            restarts += int(restarted)
            if psi_d >= 0:
                return finish(SolveStatus.DEGENERATE, f"psi(x, d)={psi_d!r} is not negative")

            search = None
            if self.fixed_mode:
                t = fixed_stepsize(psi_d, d, metric, delta)
                delta_k = delta
            else:
                try:
                    search = wolfe_stepsize(
                        problem, x, d, config.rho1, config.rho2,
                        strong=config.stepsize_mode == StepsizeMode.STRONG_WOLFE,
                        objectives=F, J=J,
                    )
                except (LineSearchError, EvaluationError) as e:
                    if isinstance(e, LineSearchError):
                        counter.add_line_search(e.func_evals, e.jac_evals)
                    return finish(SolveStatus.ERROR, f"Line search failed: {e}")
                counter.add_line_search(search.func_evals, search.jac_evals)
                t = search.t
                # delta that reproduces t through the fixed formula
                delta_k = -t * metric.norm_sq(d) / psi_d
            if t == 0.0:
                return finish(SolveStatus.DEGENERATE, "zero stepsize")

            x_new = x + t * d
            if config.enforce_domain and not problem.in_domain(x_new):
                return finish(SolveStatus.ERROR, f"iterate left the box {problem.bounds}")
            if search is not None:
                # the line search already evaluated the accepted point
                F_new, J_new = search.objectives, search.J
            else:
                try:
                    F_new = counter.evaluate(x_new)
                    J_new = counter.jacobian(x_new)
                except EvaluationError as e:
                    return finish(SolveStatus.ERROR, str(e))

            diag = rho_diagnostic(J, J_new, x, x_new, d, metric, delta_k, t)
            norm_d = float(np.linalg.norm(d))
            self._check_step(k, F, F_new, J, J_new, diag, t * norm_d)
            tau = abs(psi_d) / norm_d
            zoutendijk += tau**2
            psi_v_sum += (sol.psi_v / norm_d) ** 2
            if k % config.record_every == 0:
                records.append(
                    IterationRecord(
                        k=k, x=x, objectives=F, norm_v=sol.norm_v, theta=sol.theta,
                        psi_v=sol.psi_v, psi_d=psi_d, beta=beta, t=t, rho=diag.rho,
                        eta=diag.eta, tau=tau, norm_d=norm_d,
                        zoutendijk_partial=zoutendijk, psi_v_partial=psi_v_sum,
                        restarted=restarted, func_evals=counter.func_evals,
                        jac_evals=counter.jac_evals,
                    )
                )
            logger.debug(f"{k=} ||v||={sol.norm_v:.3e} {beta=:.3e} {t=:.3e} rho={diag.rho:.6f}")

            prev = _Previous(J=J, psi_v=sol.psi_v, psi_d=psi_d, rho=diag.rho, d=d)
            x, F, J = x_new, F_new, J_new
            sol = solve_subproblem(J)
            min_norm_v = min(min_norm_v, sol.norm_v)
            k += 1


def solve(
    problem: ObjectiveProblem,
    x0,
    config: Optional[SolveConfig] = None,
    params: Optional[StepParameters] = None,
) -> SolveReport:
    """Run the CG iteration from x0 until ||v(x^k)|| <= tolerance or max_iters."""
    return ConjugateGradientSolver(problem, config or SolveConfig(), params).solve(x0)


@dataclass(frozen=True)
class ZoutendijkSummary:
    partial_sum: float
    last_window_increment: float
    increments: np.ndarray
    partial_sums: np.ndarray
    psi_v_partial_sums: np.ndarray

    @property
    def nondecreasing(self) -> bool:
        return bool(np.all(np.diff(self.partial_sums) >= 0))


def zoutendijk_diag(
    records: Sequence[IterationRecord], window: int = 10
) -> ZoutendijkSummary:
    """
    Partial sums of psi^2(x^k, d^k) / ||d^k||^2 and of
    psi^2(x^k, v(x^k)) / ||d^k||^2 over the recorded steps.

    ``increments`` are differences between consecutive recorded partial sums
    (single terms when nothing was thinned); ``last_window_increment`` is
    their sum over the final ``window`` records.
    """
    if not records:
        raise SolverError("zoutendijk_diag needs at least one record")
    steps = [r for r in records if r.psi_d is not None]
    partial_sums = np.array([r.zoutendijk_partial for r in steps])
    increments = np.diff(np.concatenate([[0.0], partial_sums]))
    return ZoutendijkSummary(
        partial_sum=float(partial_sums[-1]) if steps else 0.0,
        last_window_increment=float(increments[-window:].sum()),
        increments=increments,
        partial_sums=partial_sums,
        psi_v_partial_sums=np.array([r.psi_v_partial for r in steps]),
    )


def nondominated_mask(points) -> np.ndarray:
    """True for the points that no other point dominates."""
    rows = [np.asarray(p, dtype=float).reshape(-1) for p in points]
    if not rows:
        return np.zeros(0, dtype=bool)
    sizes = {row.size for row in rows}
    if len(sizes) != 1:
        raise DimensionMismatchError(f"Objective vectors have mixed lengths {sorted(sizes)}")
    values = np.vstack(rows)
    # weakly_better[j, i]: values[j] <= values[i] componentwise
    weakly_better = np.all(values[:, None, :] <= values[None, :, :], axis=2)
    different = np.any(values[:, None, :] != values[None, :, :], axis=2)
    return ~np.any(weakly_better & different, axis=0)


def nondominated_filter(points) -> np.ndarray:
    """Subset of ``points`` not dominated by any other point."""
    mask = nondominated_mask(points)
    if not mask.size:
        return np.zeros((0, 0))
    return np.vstack([np.asarray(p, dtype=float).reshape(-1) for p in points])[mask]


@dataclass
class ParetoFront:
    starts: np.ndarray
    reports: List[SolveReport]
    dominated: np.ndarray
    m: int

    @property
    def points(self) -> np.ndarray:
        return np.vstack([r.final_x for r in self.reports])

    @property
    def valid(self) -> np.ndarray:
        return np.array([r.status != SolveStatus.ERROR for r in self.reports])

    @property
    def objectives(self) -> List[Optional[np.ndarray]]:
        return [r.final_objectives for r in self.reports]

    @property
    def front(self) -> np.ndarray:
        keep = self.valid & ~self.dominated
        rows = [r.final_objectives for r, k in zip(self.reports, keep) if k]
        if not rows:
            return np.empty((0, self.m))
        return np.vstack(rows)

    @property
    def converged_count(self) -> int:
        return sum(r.status == SolveStatus.CONVERGED for r in self.reports)

    @property
    def restarts(self) -> int:
        return sum(r.restarts for r in self.reports)


def _guarded_solve(problem, x0, config, params) -> SolveReport:
    try:
        return solve(problem, x0, config, params)
    except MocgError as e:
        logger.error(f"Start {np.asarray(x0).tolist()} failed: {e}")
        return SolveReport.failed(problem, x0, str(e))


def multistart_pareto(
    problem: ObjectiveProblem,
    starts: int,
    seed: int,
    config: Optional[SolveConfig] = None,
    scheduler: str = "synchronous",
) -> ParetoFront:
    """
    Solve from ``starts`` seeded uniform points in the box and mark the
    nondominated final objective vectors.

    Runs are independent and are executed through dask with the given
    ``scheduler``; results keep start-index order.
    """
    if starts < 1:
        raise ValueError(f"Need at least one start, got {starts=}")
    config = config or SolveConfig()
    rng = np.random.default_rng(seed)
    x0s = problem.sample_points(rng, starts)
    params = StepParameters.resolve(problem, config)

    logger.info(f"Multistart on {problem.name}: {starts=} {seed=} {scheduler=}")
    tasks = [dask.delayed(_guarded_solve)(problem, x0, config, params) for x0 in x0s]
    reports = list(dask.compute(*tasks, scheduler=scheduler))

    valid = [r.status != SolveStatus.ERROR for r in reports]
    dominated = np.ones(starts, dtype=bool)
    valid_idx = [i for i, ok in enumerate(valid) if ok]
    if valid_idx:
        mask = nondominated_mask([reports[i].final_objectives for i in valid_idx])
        dominated[valid_idx] = ~mask
    front = ParetoFront(starts=x0s, reports=reports, dominated=dominated, m=problem.m)
    logger.info(
        f"Multistart finished: {front.converged_count}/{starts} converged, "
        f"{int((~dominated).sum())} nondominated"
    )
    return front
