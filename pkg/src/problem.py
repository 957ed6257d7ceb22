"""
Multiobjective problem abstraction and the catalog of analytic test problems.

Every catalog entry is smooth, carries exact per-objective Lipschitz constants
for its gradients and, when strongly convex, exact convexity constants. The
Pareto sets are known in closed form and exposed as distance functions.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from src.exceptions import CatalogError, DimensionMismatchError, EvaluationError

logger = logging.getLogger(__name__)

DEFAULT_BOUNDS = (-10.0, 10.0)
DEFAULT_FD_STEP = 1e-5


def _readonly(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class JacobianMatrix:
    """Rows are the objective gradients at ``point``."""

    rows: np.ndarray
    point: Optional[np.ndarray] = None

    def __post_init__(self):
        rows = _readonly(self.rows)
        if rows.ndim == 1:
            rows = _readonly(rows[np.newaxis, :])
        if rows.ndim != 2 or rows.shape[0] == 0 or rows.shape[1] == 0:
            raise DimensionMismatchError(
                f"Jacobian rows must form a non-empty m x n matrix, got shape {rows.shape}"
            )
        bad = np.argwhere(~np.isfinite(rows))
        if bad.size:
            raise EvaluationError(
                f"Jacobian entry {tuple(bad[0])} is not finite", index=int(bad[0][0])
            )
        object.__setattr__(self, "rows", rows)
        if self.point is not None:
            point = _readonly(self.point)
            if point.shape != (rows.shape[1],):
                raise DimensionMismatchError(
                    f"Point of shape {point.shape} does not match {rows.shape[1]} columns"
                )
            object.__setattr__(self, "point", point)

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def directional(self, d: np.ndarray) -> np.ndarray:
        """JF(x)d, the vector of directional derivatives."""
        d = np.asarray(d, dtype=float)
        if d.shape != (self.n,):
            raise DimensionMismatchError(
                f"Direction of shape {d.shape} does not match n={self.n}"
            )
        return self.rows @ d

    def gram(self) -> np.ndarray:
        return self.rows @ self.rows.T


@dataclass(frozen=True)
class ObjectiveProblem:
    """
    An n-dimensional, m-objective differentiable problem.

    Parameters
    ----------
    name : str
        Catalog identifier.
    n, m : int
        Dimension of the decision space and number of objectives.
    objective : callable
        Maps a point of length n to the objective vector of length m.
    gradient : callable
        Maps a point to the m x n Jacobian (row i is the gradient of F_i).
    lipschitz_constants : tuple of float, optional
        Per-objective Lipschitz constants L_i of the gradients on ``bounds``.
    convexity_constants : tuple of float, optional
        Per-objective strong convexity constants mu_i on ``bounds``.
    pareto_distance : callable, optional
        Euclidean distance from a point to the analytic Pareto set.
    bounds : (float, float)
        Box test domain applied to every coordinate.
    exploratory : bool
        Marks problems outside the strongly convex theorem suites.
    minimizers : tuple of arrays, optional
        Analytic minimizer of each single objective.
    """

    name: str
    n: int
    m: int
    objective: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    gradient: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    lipschitz_constants: Optional[Tuple[float, ...]] = None
    convexity_constants: Optional[Tuple[float, ...]] = None
    pareto_distance: Optional[Callable[[np.ndarray], float]] = field(
        default=None, repr=False
    )
    bounds: Tuple[float, float] = DEFAULT_BOUNDS
    exploratory: bool = False
    minimizers: Optional[Tuple[np.ndarray, ...]] = field(default=None, repr=False)

    @property
    def lipschitz(self) -> Optional[float]:
        """L = max_i L_i when declared."""
        if self.lipschitz_constants is None:
            return None
        return float(max(self.lipschitz_constants))

    @property
    def convexity(self) -> Optional[float]:
        """mu = min_i mu_i when declared."""
        if self.convexity_constants is None:
            return None
        return float(min(self.convexity_constants))

    def in_domain(self, x: np.ndarray) -> bool:
        lo, hi = self.bounds
        return bool(np.all(x >= lo) and np.all(x <= hi))

    def known_pareto_set(self, x: np.ndarray, tol: float = 1e-6) -> bool:
        """Analytic membership test for the Pareto set."""
        if self.pareto_distance is None:
            raise ValueError(f"Problem {self.name} has no analytic Pareto set")
        return self.pareto_distance(np.asarray(x, dtype=float)) <= tol

    def sample_points(self, rng: np.random.Generator, count: int) -> np.ndarray:
        lo, hi = self.bounds
        return rng.uniform(lo, hi, size=(count, self.n))


def _as_point(problem: ObjectiveProblem, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise DimensionMismatchError(
            f"Point of shape {x.shape} does not match n={problem.n} for {problem.name}"
        )
    return x


def evaluate(problem: ObjectiveProblem, x) -> np.ndarray:
    """Objective vector (F_1(x), ..., F_m(x))."""
    x = _as_point(problem, x)
    values = np.asarray(problem.objective(x), dtype=float).reshape(-1)
    if values.shape != (problem.m,):
        raise DimensionMismatchError(
            f"{problem.name} returned {values.shape[0]} objectives, expected {problem.m}"
        )
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise EvaluationError(
            f"{problem.name}: objective {bad[0]} is not finite at x={x.tolist()}",
            index=int(bad[0]),
        )
    return values


def jacobian(problem: ObjectiveProblem, x) -> JacobianMatrix:
    """Jacobian whose row i is the gradient of F_i at x."""
    x = _as_point(problem, x)
    rows = np.asarray(problem.gradient(x), dtype=float).reshape(problem.m, problem.n)
    bad = np.argwhere(~np.isfinite(rows))
    if bad.size:
        raise EvaluationError(
            f"{problem.name}: gradient entry {tuple(bad[0])} is not finite at x={x.tolist()}",
            index=int(bad[0][0]),
        )
    return JacobianMatrix(rows, x)


def finite_difference_jacobian(
    problem: ObjectiveProblem, x, h: float = DEFAULT_FD_STEP
) -> np.ndarray:
    """Central difference estimate of the Jacobian."""
    x = _as_point(problem, x)
    estimate = np.empty((problem.m, problem.n))
    for j in range(problem.n):
        step = np.zeros(problem.n)
        step[j] = h
        estimate[:, j] = (evaluate(problem, x + step) - evaluate(problem, x - step)) / (
            2 * h
        )
    return estimate


def check_gradients(problem: ObjectiveProblem, x, h: float = DEFAULT_FD_STEP) -> float:
    """Max absolute difference between the central-difference and analytic Jacobians."""
    if h <= 0:
        raise ValueError(f"Finite difference step must be positive, got {h=}")
    estimate = finite_difference_jacobian(problem, x, h)
    return float(np.max(np.abs(estimate - jacobian(problem, x).rows)))


class ConstantRatios(NamedTuple):
    """Worst observed ratios against the declared constants (None if undeclared)."""

    lipschitz: Optional[float]
    convexity: Optional[float]


def constant_violations(
    problem: ObjectiveProblem, pairs: int = 1000, seed: int = 0
) -> ConstantRatios:
    """
    Sample point pairs in the box and compare gradient differences with the
    declared constants.

    ``lipschitz`` is max ||g_i(x) - g_i(y)|| / (L_i ||x - y||), which must stay
    <= 1; ``convexity`` is min (g_i(x) - g_i(y))'(x - y) / (mu_i ||x - y||^2),
    which must stay >= 1.
    """
    rng = np.random.default_rng(seed)
    xs = problem.sample_points(rng, pairs)
    ys = problem.sample_points(rng, pairs)
    worst_lip = 0.0
    worst_cvx = np.inf
    for x, y in zip(xs, ys):
        step = x - y
        dist_sq = float(step @ step)
        if dist_sq == 0.0:
            continue
        diff = jacobian(problem, x).rows - jacobian(problem, y).rows
        if problem.lipschitz_constants is not None:
            ratios = np.linalg.norm(diff, axis=1) / (
                np.asarray(problem.lipschitz_constants) * np.sqrt(dist_sq)
            )
            worst_lip = max(worst_lip, float(ratios.max()))
        if problem.convexity_constants is not None:
            ratios = (diff @ step) / (np.asarray(problem.convexity_constants) * dist_sq)
            worst_cvx = min(worst_cvx, float(ratios.min()))
    return ConstantRatios(
        lipschitz=worst_lip if problem.lipschitz_constants is not None else None,
        convexity=worst_cvx if problem.convexity_constants is not None else None,
    )


# Catalog


def _segment_distance(p: np.ndarray, q: np.ndarray) -> Callable[[np.ndarray], float]:
    """Distance to the segment [p, q]."""
    direction = q - p
    length_sq = float(direction @ direction)

    def distance(x: np.ndarray) -> float:
        s = float(np.clip((x - p) @ direction / length_sq, 0.0, 1.0))
        return float(np.linalg.norm(x - (p + s * direction)))

    return distance


def _shifted_quadratics(
    name: str, centers: List[np.ndarray], diagonal: np.ndarray
) -> ObjectiveProblem:
    """F_i(x) = 1/2 (x - c_i)' D (x - c_i) with a shared diagonal Hessian D."""
    centers_arr = np.array(centers, dtype=float)
    diagonal = np.asarray(diagonal, dtype=float)
    m, n = centers_arr.shape

    def objective(x: np.ndarray) -> np.ndarray:
        shifted = x - centers_arr
        return 0.5 * np.sum(diagonal * shifted**2, axis=1)

    def gradient(x: np.ndarray) -> np.ndarray:
        return diagonal * (x - centers_arr)

    # with a shared Hessian the minimizer of sum_i lambda_i F_i is sum_i lambda_i c_i
    pareto_distance = _segment_distance(centers_arr[0], centers_arr[1]) if m == 2 else None
    return ObjectiveProblem(
        name=name,
        n=n,
        m=m,
        objective=objective,
        gradient=gradient,
        lipschitz_constants=tuple([float(diagonal.max())] * m),
        convexity_constants=tuple([float(diagonal.min())] * m),
        pareto_distance=pareto_distance,
        minimizers=tuple(_readonly(c) for c in centers_arr),
    )


def _unit(n: int, sign: float = 1.0) -> np.ndarray:
    e = np.zeros(n)
    e[0] = sign
    return e


def quad_pair(n: int) -> ObjectiveProblem:
    """F_1 = 1/2 ||x - e_1||^2, F_2 = 1/2 ||x + e_1||^2; Pareto set [-e_1, e_1]."""
    return _shifted_quadratics("quad-pair", [_unit(n), _unit(n, -1.0)], np.ones(n))


def jos1(n: int) -> ObjectiveProblem:
    """F_1 = (1/n) ||x||^2, F_2 = (1/n) ||x - 2||^2; Hessians (2/n) I."""
    return _shifted_quadratics(
        "jos1", [np.zeros(n), np.full(n, 2.0)], np.full(n, 2.0 / n)
    )


def aniso_pair(n: int) -> ObjectiveProblem:
    """Shifted quadratics sharing the Hessian diag(linspace(1, 4, n))."""
    return _shifted_quadratics(
        "aniso-pair", [_unit(n), _unit(n, -1.0)], np.linspace(1.0, 4.0, n)
    )


def huber_pair(n: int) -> ObjectiveProblem:
    """
    Pseudo-Huber distances F_i = sqrt(1 + ||x - c_i||^2) - 1 with c = +/- e_1.

    Convex with 1-Lipschitz gradients but not strongly convex on the box, so it
    is excluded from the DY/HS theorem suites.
    """
    centers = np.array([_unit(n), _unit(n, -1.0)])

    def objective(x: np.ndarray) -> np.ndarray:
        shifted = x - centers
        return np.sqrt(1.0 + np.sum(shifted**2, axis=1)) - 1.0

    def gradient(x: np.ndarray) -> np.ndarray:
        shifted = x - centers
        return shifted / np.sqrt(1.0 + np.sum(shifted**2, axis=1))[:, np.newaxis]

    return ObjectiveProblem(
        name="huber-pair",
        n=n,
        m=2,
        objective=objective,
        gradient=gradient,
        lipschitz_constants=(1.0, 1.0),
        convexity_constants=None,
        pareto_distance=_segment_distance(centers[0], centers[1]),
        exploratory=True,
        minimizers=tuple(_readonly(c) for c in centers),
    )


_CATALOG: Dict[str, Callable[[int], ObjectiveProblem]] = {
    "quad-pair": quad_pair,
    "jos1": jos1,
    "aniso-pair": aniso_pair,
    "huber-pair": huber_pair,
}


def catalog_names() -> List[str]:
    return sorted(_CATALOG)


def register_problem(name: str, factory: Callable[[int], ObjectiveProblem]) -> None:
    """Add a problem factory to the catalog (used for fixtures)."""
    if name in _CATALOG:
        raise CatalogError(f"Problem {name!r} is already registered")
    logger.debug(f"Registering problem {name}")
    _CATALOG[name] = factory


def unregister_problem(name: str) -> None:
    _CATALOG.pop(name, None)


def builtin_problem(name: str, n: int) -> ObjectiveProblem:
    """Build a fully populated problem from the catalog."""
    if name not in _CATALOG:
        raise CatalogError(
            f"Unknown problem {name!r}. Valid names: {', '.join(catalog_names())}"
        )
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise CatalogError(f"Problem {name!r} needs a positive integer dimension, got {n=}")
    return _CATALOG[name](int(n))
