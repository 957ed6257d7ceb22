"""
Steepest descent subproblem.

v(x) minimizes psi(x, d) + 1/2 ||d||^2 where psi(x, d) = max_i <grad F_i(x), d>.
It is computed through the dual: minimize 1/2 ||J' lam||^2 over the
probability simplex, then v = -J' lam. For up to 12 objectives the dual is
solved exactly by enumerating supports; beyond that a projected gradient
method runs until the duality gap is below tolerance.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from src.exceptions import OracleScopeError, SubproblemSolverError
from src.problem import JacobianMatrix

logger = logging.getLogger(__name__)

DUALITY_GAP_TOL = 1e-10
INVARIANT_TOL = 1e-8
MAX_ENUMERATION_OBJECTIVES = 12
MAX_ORACLE_OBJECTIVES = 4
PROJECTED_GRADIENT_MAX_ITERS = 20_000


@dataclass(frozen=True)
class SubproblemSolution:
    """
    Steepest descent direction ``v``, optimal value ``theta``, simplex
    weights ``lam`` and ``psi_v`` = psi(x, v). ``gap`` is the dual gap
    ||v||^2 + psi(x, v), zero at the exact solution.
    """

    v: np.ndarray
    theta: float
    lam: np.ndarray
    psi_v: float
    gap: float = 0.0

    @property
    def norm_v(self) -> float:
        return float(np.linalg.norm(self.v))


def psi_with_index(J: JacobianMatrix, d) -> Tuple[float, int]:
    """max_i <g_i, d> and the smallest index achieving it."""
    products = J.directional(d)
    index = int(np.argmax(products))
    return float(products[index]), index


def psi(J: JacobianMatrix, d) -> float:
    return psi_with_index(J, d)[0]


def _solution_from_weights(J: JacobianMatrix, lam: np.ndarray) -> SubproblemSolution:
    v = -(J.rows.T @ lam)
    psi_v = psi(J, v)
    norm_sq = float(v @ v)
    return SubproblemSolution(
        v=v,
        theta=psi_v + 0.5 * norm_sq,
        lam=lam,
        psi_v=psi_v,
        gap=norm_sq + psi_v,
    )


def _gap(gram: np.ndarray, lam: np.ndarray) -> float:
    grad = gram @ lam
    return float(lam @ grad - grad.min())


def _enumerate_supports(gram: np.ndarray) -> Optional[np.ndarray]:
    """Exact dual minimizer by trying every support; None if no candidate passes."""
    m = gram.shape[0]
    scale = max(1.0, float(np.abs(gram).max()))
    best, best_value = None, np.inf
    for size in range(1, m + 1):
        for support in itertools.combinations(range(m), size):
            idx = list(support)
            # stationarity on the support: G_SS lam_S = nu 1, sum(lam_S) = 1
            kkt = np.zeros((size + 1, size + 1))
            kkt[:size, :size] = gram[np.ix_(idx, idx)]
            kkt[:size, size] = -1.0
            kkt[size, :size] = 1.0
            rhs = np.zeros(size + 1)
            rhs[size] = 1.0
            solution = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
            lam_support = solution[:size]
            if lam_support.min() < -1e-12 or abs(lam_support.sum() - 1.0) > 1e-9:
                continue
            lam = np.zeros(m)
            lam[idx] = np.clip(lam_support, 0.0, None)
            lam /= lam.sum()
            if _gap(gram, lam) > DUALITY_GAP_TOL * scale:
                continue
            value = float(lam @ gram @ lam)
            if value < best_value:
                best, best_value = lam, value
    return best


def project_onto_simplex(x: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort based)."""
    u = np.sort(x)[::-1]
    cssv = np.cumsum(u) - 1.0
    rho = np.count_nonzero(u * np.arange(1, x.size + 1) > cssv) - 1
    theta = cssv[rho] / (rho + 1)
    return np.maximum(x - theta, 0.0)


def _projected_gradient(gram: np.ndarray) -> np.ndarray:
    m = gram.shape[0]
    scale = max(1.0, float(np.abs(gram).max()))
    step = 1.0 / max(float(np.linalg.eigvalsh(gram).max()), 1e-300)
    lam = np.full(m, 1.0 / m)
    best_lam, best_gap = lam, _gap(gram, lam)
    for _ in range(PROJECTED_GRADIENT_MAX_ITERS):
        gap = _gap(gram, lam)
        if gap < best_gap:
            best_lam, best_gap = lam, gap
        if gap <= DUALITY_GAP_TOL * scale:
            return lam
        lam = project_onto_simplex(lam - step * (gram @ lam))
    raise SubproblemSolverError(
        f"Projected gradient stopped after {PROJECTED_GRADIENT_MAX_ITERS} iterations "
        f"with duality gap {best_gap:.3e}",
        best_dual=0.5 * float(best_lam @ gram @ best_lam),
        gap=best_gap,
    )


def solve_subproblem(J: JacobianMatrix) -> SubproblemSolution:
    """Unique minimizer of psi(x, d) + 1/2 ||d||^2 via the simplex dual."""
    if not np.any(J.rows):
        lam = np.zeros(J.m)
        lam[0] = 1.0
        return SubproblemSolution(v=np.zeros(J.n), theta=0.0, lam=lam, psi_v=0.0)

    gram = J.gram()
    lam = None
    if J.m <= MAX_ENUMERATION_OBJECTIVES:
        lam = _enumerate_supports(gram)
        if lam is None:
            logger.warning(
                f"Support enumeration found no KKT point for m={J.m}, using projected gradient"
            )
    if lam is None:
        lam = _projected_gradient(gram)
    return _solution_from_weights(J, lam)


def _triangle(total: int) -> np.ndarray:
    """All (a, b, c) with non-negative integers summing to total."""
    a, b = np.meshgrid(np.arange(total + 1), np.arange(total + 1), indexing="ij")
    mask = a + b <= total
    a, b = a[mask], b[mask]
    return np.column_stack([a, b, total - a - b])


def _simplex_grid(m: int, steps: int) -> Iterator[np.ndarray]:
    if m == 3:
        yield _triangle(steps)
        return
    for first in range(steps + 1):
        rest = _triangle(steps - first)
        yield np.column_stack([np.full(len(rest), first), rest])


def solve_subproblem_oracle(
    J: JacobianMatrix, resolution: float = 1e-3
) -> SubproblemSolution:
    """
    Brute-force reference solution of the dual.

    m=1 is trivial, m=2 uses the closed-form minimizer of the one-dimensional
    quadratic, m=3 and m=4 scan a simplex grid with spacing ``resolution``.
    """
    if resolution <= 0:
        raise ValueError(f"Oracle resolution must be positive, got {resolution=}")
    m = J.m
    if m > MAX_ORACLE_OBJECTIVES:
        raise OracleScopeError(
            f"Oracle supports at most {MAX_ORACLE_OBJECTIVES} objectives, got m={m}"
        )
    if m == 1:
        return _solution_from_weights(J, np.ones(1))
    if m == 2:
        g1, g2 = J.rows
        diff = g1 - g2
        denom = float(diff @ diff)
        weight = 1.0 if denom == 0.0 else float(np.clip(-(g2 @ diff) / denom, 0.0, 1.0))
        return _solution_from_weights(J, np.array([weight, 1.0 - weight]))

    gram = J.gram()
    steps = max(1, int(round(1.0 / resolution)))
    best_lam, best_value = None, np.inf
    for chunk in _simplex_grid(m, steps):
        weights = chunk / steps
        values = np.einsum("ki,ij,kj->k", weights, gram, weights)
        i = int(np.argmin(values))
        if values[i] < best_value:
            best_lam, best_value = weights[i], float(values[i])
    return _solution_from_weights(J, best_lam)


def is_pareto_critical(sol: SubproblemSolution, tol: float) -> bool:
    if tol <= 0:
        raise ValueError(f"Criticality tolerance must be positive, got {tol=}")
    return sol.norm_v <= tol
