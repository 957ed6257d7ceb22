"""
Conjugate gradient directions d^k = v(x^k) + beta_k d^{k-1}.

Vector extensions of the FR, CD, DY, PRP and HS parameters are written in
terms of psi values only, so each family reduces to its classical scalar form
when there is a single objective.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from src.exceptions import DirectionError

logger = logging.getLogger(__name__)

DENOMINATOR_TOL = 1e-14
DEFAULT_FR_CAP = 0.9


class BetaFamily(str, Enum):
    FR = "fr"
    CD = "cd"
    DY = "dy"
    PRP = "prp"
    HS = "hs"


class GuardPolicy(str, Enum):
    RESTART = "restart"
    OFF = "off"


class GuardDecision(str, Enum):
    KEEP = "keep"
    RESTART = "restart"


def dy_eta_bound(c: float) -> float:
    """Upper end (exclusive) of the admissible DY scaling, (1 - c) / (1 + c)."""
    return (1.0 - c) / (1.0 + c)


@dataclass(frozen=True)
class BetaRule:
    """
    A beta family together with its modifiers.

    ``fr_cap_xi`` caps |beta| at xi * beta^FR, ``dy_scale_eta`` multiplies the
    DY value (None lets the solver pick the theorem default once c is known),
    ``clamp_nonneg`` takes max(beta, 0) and is forced on for PRP and HS.
    """

    family: BetaFamily
    fr_cap_xi: Optional[float] = None
    dy_scale_eta: Optional[float] = None
    clamp_nonneg: bool = False

    def __post_init__(self):
        object.__setattr__(self, "family", BetaFamily(self.family))
        if self.fr_cap_xi is not None and not 0 < self.fr_cap_xi < 1:
            raise DirectionError(f"FR cap xi must lie in (0, 1), got {self.fr_cap_xi}")
        if self.dy_scale_eta is not None:
            if self.family != BetaFamily.DY:
                raise DirectionError("dy_scale_eta only applies to the DY family")
            if self.dy_scale_eta < 0:
                raise DirectionError(f"DY scale must be non-negative, got {self.dy_scale_eta}")
        if self.family in (BetaFamily.PRP, BetaFamily.HS):
            object.__setattr__(self, "clamp_nonneg", True)

    @classmethod
    def theorem_default(cls, family, c: Optional[float] = None) -> "BetaRule":
        """The modifier each convergence result asks for."""
        family = BetaFamily(family)
        if family == BetaFamily.FR:
            return cls(family, fr_cap_xi=DEFAULT_FR_CAP)
        if family == BetaFamily.DY:
            return cls(family, dy_scale_eta=default_dy_eta(c))
        return cls(family)

    def with_dy_eta(self, eta: float) -> "BetaRule":
        return BetaRule(self.family, self.fr_cap_xi, eta, self.clamp_nonneg)

    def describe(self) -> dict:
        return {
            "family": self.family.value,
            "fr_cap_xi": self.fr_cap_xi,
            "dy_scale_eta": self.dy_scale_eta,
            "clamp_nonneg": self.clamp_nonneg,
        }


def default_dy_eta(c: Optional[float]) -> float:
    """Half of the admissible range, or 0 (steepest descent) when c is unknown."""
    if c is None:
        logger.warning("No convexity constant available, DY scale falls back to eta=0")
        return 0.0
    return 0.5 * dy_eta_bound(c)


@dataclass(frozen=True)
class BetaInputs:
    """The psi values entering the five beta formulas at iteration k."""

    psi_k_vk: float
    psi_km1_vkm1: float
    psi_km1_dkm1: float
    psi_k_dkm1: float
    psi_km1_vk: float


def _ratio(numerator: float, denominator: float) -> Optional[float]:
    if abs(denominator) < DENOMINATOR_TOL:
        return None
    return numerator / denominator


def fr_value(inputs: BetaInputs) -> Optional[float]:
    return _ratio(inputs.psi_k_vk, inputs.psi_km1_vkm1)


def raw_beta(family: BetaFamily, inputs: BetaInputs) -> Optional[float]:
    """Unmodified family value, None when the denominator is degenerate."""
    curvature = inputs.psi_k_dkm1 - inputs.psi_km1_dkm1
    prp_numerator = -inputs.psi_k_vk + inputs.psi_km1_vk
    if family == BetaFamily.FR:
        return fr_value(inputs)
    if family == BetaFamily.CD:
        return _ratio(inputs.psi_k_vk, inputs.psi_km1_dkm1)
    if family == BetaFamily.DY:
        return _ratio(-inputs.psi_k_vk, curvature)
    if family == BetaFamily.PRP:
        return _ratio(prp_numerator, -inputs.psi_km1_vkm1)
    return _ratio(prp_numerator, curvature)


def compute_beta(rule: BetaRule, inputs: BetaInputs) -> float:
    """beta_k with the rule's modifiers applied; 0 signals a restart."""
    beta = raw_beta(rule.family, inputs)
    if beta is None:
        logger.debug(f"Degenerate {rule.family.value} denominator, restarting")
        return 0.0
    if rule.family == BetaFamily.CD and beta <= 0:
        logger.debug(f"Non-positive CD value {beta}, restarting")
        return 0.0
    if rule.family == BetaFamily.DY and rule.dy_scale_eta is not None:
        beta *= rule.dy_scale_eta
    if rule.clamp_nonneg:
        beta = max(beta, 0.0)
    if rule.fr_cap_xi is not None:
        beta_fr = fr_value(inputs)
        if beta_fr is None or beta_fr <= 0:
            return 0.0
        beta = float(np.sign(beta)) * min(abs(beta), rule.fr_cap_xi * beta_fr)
    return float(beta)


def update_direction(
    v_k: np.ndarray, beta: float, d_prev: Optional[np.ndarray], k: int
) -> np.ndarray:
    """d = v_k at k = 0, otherwise v_k + beta * d_prev."""
    v_k = np.asarray(v_k, dtype=float)
    if k == 0:
        return v_k.copy()
    if d_prev is None:
        raise DirectionError(f"Iteration {k=} needs the previous direction")
    return v_k + beta * np.asarray(d_prev, dtype=float)


def descent_guard(
    psi_d: float, psi_v: float, policy: GuardPolicy = GuardPolicy.RESTART
) -> GuardDecision:
    """Restart when d fails to be a strict descent direction."""
    if psi_v >= 0:
        raise DirectionError(f"Descent guard needs a non-critical iterate, got {psi_v=}")
    if GuardPolicy(policy) == GuardPolicy.RESTART and psi_d >= 0:
        return GuardDecision.RESTART
    return GuardDecision.KEEP
