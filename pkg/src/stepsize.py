"""
Stepsize selection without line search, its diagnostics, and the Wolfe
line-search baseline.

The fixed stepsize is t = -delta * psi(x, d) / ||d||_B^2 with a metric B whose
spectrum is certified to lie in [a_min, a_max] and 0 < delta < a_min / L.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from src.exceptions import (
    ContractViolationError,
    DimensionMismatchError,
    InconsistentPointsError,
    LineSearchError,
    NotDescentDirectionError,
)
from src.problem import JacobianMatrix, ObjectiveProblem, evaluate, jacobian
from src.subproblem import psi

logger = logging.getLogger(__name__)

DEFAULT_SAFETY = 0.9
DEFAULT_RHO1 = 1e-4
DEFAULT_RHO2 = 0.1
WOLFE_MAX_EVALS = 50
LIPSCHITZ_SAMPLE_PAIRS = 200
LIPSCHITZ_INFLATION = 1.5


class MetricKind(str, Enum):
    IDENTITY = "identity"
    DIAGONAL = "diagonal"


@dataclass(frozen=True)
class MetricProvider:
    """Constant positive definite metric B with exact spectral bounds."""

    kind: MetricKind = MetricKind.IDENTITY
    diagonal: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == MetricKind.IDENTITY:
            if self.diagonal is not None:
                raise ValueError("Identity metric takes no diagonal")
            return
        if self.diagonal is None:
            raise ValueError("Diagonal metric needs its entries")
        entries = np.array(self.diagonal, dtype=float).reshape(-1)
        if entries.size == 0 or not np.all(np.isfinite(entries)) or np.any(entries <= 0):
            raise ValueError(
                f"Diagonal metric entries must be finite and positive, got {entries.tolist()}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "diagonal", entries)

    @classmethod
    def identity(cls) -> "MetricProvider":
        return cls()

    @classmethod
    def fixed_diagonal(cls, entries) -> "MetricProvider":
        return cls(kind=MetricKind.DIAGONAL, diagonal=entries)

    @property
    def a_min(self) -> float:
        if self.kind == MetricKind.IDENTITY:
            return 1.0
        return float(self.diagonal.min())

    @property
    def a_max(self) -> float:
        if self.kind == MetricKind.IDENTITY:
            return 1.0
        return float(self.diagonal.max())

    def check_dimension(self, n: int) -> None:
        if self.kind == MetricKind.DIAGONAL and self.diagonal.size != n:
            raise DimensionMismatchError(
                f"Diagonal metric has {self.diagonal.size} entries, problem has n={n}"
            )

    def norm_sq(self, d: np.ndarray) -> float:
        """||d||_B^2 = d' B d."""
        if self.kind == MetricKind.IDENTITY:
            return float(d @ d)
        self.check_dimension(d.size)
        return float(np.sum(self.diagonal * d * d))

    def matrix(self, n: int) -> np.ndarray:
        if self.kind == MetricKind.IDENTITY:
            return np.eye(n)
        self.check_dimension(n)
        return np.diag(self.diagonal)


def compute_delta(a_min: float, L: float, safety: float = DEFAULT_SAFETY) -> float:
    """delta = safety * a_min / L, strictly inside (0, a_min / L)."""
    if a_min <= 0 or L <= 0:
        raise ContractViolationError(f"a_min and L must be positive, got {a_min=}, {L=}")
    if not 0 < safety < 1:
        raise ContractViolationError(f"safety must lie in (0, 1), got {safety=}")
    return safety * a_min / L


@dataclass(frozen=True)
class StepsizeRule:
    """delta together with the constants it was derived from."""

    delta: float
    safety: float
    lipschitz: float
    a_min: float
    lipschitz_estimated: bool = False

    @classmethod
    def build(
        cls,
        metric: MetricProvider,
        lipschitz: float,
        safety: float = DEFAULT_SAFETY,
        lipschitz_estimated: bool = False,
    ) -> "StepsizeRule":
        return cls(
            delta=compute_delta(metric.a_min, lipschitz, safety),
            safety=safety,
            lipschitz=lipschitz,
            a_min=metric.a_min,
            lipschitz_estimated=lipschitz_estimated,
        )

    @property
    def ratio(self) -> float:
        """L * delta / a_min, always < 1."""
        return self.lipschitz * self.delta / self.a_min


def fixed_stepsize(
    psi_d: float, d: np.ndarray, metric: MetricProvider, delta: float
) -> float:
    """t = -delta * psi(x, d) / ||d||_B^2."""
    norm_sq = metric.norm_sq(np.asarray(d, dtype=float))
    if norm_sq == 0.0:
        if psi_d != 0.0:
            raise ContractViolationError(
                f"Zero direction with non-zero psi(x, d)={psi_d!r}"
            )
        return 0.0
    return -delta * psi_d / norm_sq


@dataclass(frozen=True)
class RhoDiagnostic:
    """rho_k and eta_k of the step, plus the relative residual of
    psi(x_k1, d) = rho * psi(x_k, d)."""

    rho: float
    eta: float
    t: float
    residual: float = 0.0


def rho_diagnostic(
    J_k: JacobianMatrix,
    J_k1: JacobianMatrix,
    x_k: np.ndarray,
    x_k1: np.ndarray,
    d: np.ndarray,
    metric: MetricProvider,
    delta: float,
    t: float,
) -> RhoDiagnostic:
    x_k = np.asarray(x_k, dtype=float)
    x_k1 = np.asarray(x_k1, dtype=float)
    d = np.asarray(d, dtype=float)
    if not np.allclose(x_k1, x_k + t * d, rtol=1e-10, atol=1e-12):
        raise InconsistentPointsError(
            f"x_k1 differs from x_k + t d by {np.max(np.abs(x_k1 - x_k - t * d)):.3e}"
        )
    psi_before = psi(J_k, d)
    if t == 0.0:
        return RhoDiagnostic(
            rho=1.0, eta=0.0, t=0.0, residual=abs(psi(J_k1, d) - psi_before)
        )
    step = x_k1 - x_k
    step_sq = float(step @ step)
    eta = (psi(J_k1, step) - psi(J_k, step)) / step_sq
    rho = 1.0 - delta * eta * float(d @ d) / metric.norm_sq(d)
    residual = abs(psi(J_k1, d) - rho * psi_before) / max(1.0, abs(psi_before))
    return RhoDiagnostic(rho=rho, eta=eta, t=t, residual=residual)


class WolfeResult(NamedTuple):
    t: float
    func_evals: int
    jac_evals: int
    objectives: np.ndarray
    J: JacobianMatrix


def wolfe_stepsize(
    problem: ObjectiveProblem,
    x,
    d,
    rho1: float = DEFAULT_RHO1,
    rho2: float = DEFAULT_RHO2,
    strong: bool = False,
    *,
    objectives: Optional[np.ndarray] = None,
    J: Optional[JacobianMatrix] = None,
    initial: float = 1.0,
    max_evals: int = WOLFE_MAX_EVALS,
) -> WolfeResult:
    """
    Bracketing and bisection search for a step satisfying the vector Wolfe
    conditions.

    Sufficient decrease is componentwise, F(x + t d) <= F(x) + rho1 t JF(x) d.
    Curvature uses phi'(t) = psi(x + t d, d): phi'(t) >= rho2 psi(x, d)
    (standard) or |phi'(t)| <= rho2 |psi(x, d)| (strong). ``objectives`` and
    ``J`` at x may be passed in to avoid re-evaluation; only evaluations made
    here are counted. The result carries F and JF at the accepted step so the
    caller can move there without evaluating again.
    """
    if not 0 < rho1 < rho2 < 1:
        raise ContractViolationError(f"Need 0 < rho1 < rho2 < 1, got {rho1=}, {rho2=}")
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    func_evals = jac_evals = 0
    if objectives is None:
        objectives = evaluate(problem, x)
        func_evals += 1
    if J is None:
        J = jacobian(problem, x)
        jac_evals += 1
    psi0 = psi(J, d)
    if psi0 >= 0:
        raise NotDescentDirectionError(f"psi(x, d)={psi0!r} is not negative")
    slopes = J.directional(d)

    lo, hi = 0.0, np.inf
    t = initial
    while func_evals < max_evals:
        trial = evaluate(problem, x + t * d)
        func_evals += 1
        if np.any(trial > objectives + rho1 * t * slopes):
            hi = t
        else:
            J_trial = jacobian(problem, x + t * d)
            phi = psi(J_trial, d)
            jac_evals += 1
            if strong:
                accepted = abs(phi) <= rho2 * abs(psi0)
            else:
                accepted = phi >= rho2 * psi0
            if accepted:
                logger.debug(f"Wolfe step {t=} after {func_evals} objective evaluations")
                return WolfeResult(
                    t=t, func_evals=func_evals, jac_evals=jac_evals,
                    objectives=trial, J=J_trial,
                )
            if strong and phi > 0:
                hi = t
            else:
                lo = t
        t = 2.0 * lo if np.isinf(hi) else 0.5 * (lo + hi)
    raise LineSearchError(
        f"No Wolfe step within {max_evals} objective evaluations (bracket [{lo}, {hi}])",
        func_evals=func_evals,
        jac_evals=jac_evals,
    )


def estimate_lipschitz(
    problem: ObjectiveProblem,
    pairs: int = LIPSCHITZ_SAMPLE_PAIRS,
    seed: int = 0,
    inflation: float = LIPSCHITZ_INFLATION,
) -> float:
    """Inflated max of sampled gradient difference quotients over the box."""
    rng = np.random.default_rng(seed)
    xs = problem.sample_points(rng, pairs)
    ys = problem.sample_points(rng, pairs)
    worst = 0.0
    for x, y in zip(xs, ys):
        dist = float(np.linalg.norm(x - y))
        if dist == 0.0:
            continue
        diff = jacobian(problem, x).rows - jacobian(problem, y).rows
        worst = max(worst, float(np.linalg.norm(diff, axis=1).max()) / dist)
    if worst == 0.0:
        raise ContractViolationError(
            f"Could not estimate a positive Lipschitz constant for {problem.name}"
        )
    estimate = inflation * worst
    logger.warning(f"Estimated L={estimate:.6g} for {problem.name} from {pairs} pairs")
    return estimate
