import numpy as np
import pytest
from numpy.testing import assert_allclose

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
    fr_value,
    raw_beta,
    update_direction,
)
from src.exceptions import DirectionError


def inputs(**overrides):
    values = dict(
        psi_k_vk=-1.0,
        psi_km1_vkm1=-2.0,
        psi_km1_dkm1=-2.0,
        psi_k_dkm1=-0.5,
        psi_km1_vk=-1.5,
    )
    values.update(overrides)
    return BetaInputs(**values)


def scalar_inputs(g_k, g_km1):
    """Inputs for a single objective with d^{k-1} = -g_{k-1}."""
    return BetaInputs(
        psi_k_vk=-float(g_k @ g_k),
        psi_km1_vkm1=-float(g_km1 @ g_km1),
        psi_km1_dkm1=-float(g_km1 @ g_km1),
        psi_k_dkm1=-float(g_k @ g_km1),
        psi_km1_vk=-float(g_km1 @ g_k),
    )


class TestBetaRule:
    def test_prp_and_hs_force_clamp(self):
        assert BetaRule(BetaFamily.PRP).clamp_nonneg
        assert BetaRule("hs").clamp_nonneg
        assert not BetaRule(BetaFamily.CD).clamp_nonneg

    @pytest.mark.parametrize("xi", [0.0, 1.0, 1.5])
    def test_cap_outside_interval(self, xi):
        with pytest.raises(DirectionError):
            BetaRule(BetaFamily.FR, fr_cap_xi=xi)

    def test_eta_only_for_dy(self):
        with pytest.raises(DirectionError):
            BetaRule(BetaFamily.FR, dy_scale_eta=0.1)
        with pytest.raises(DirectionError):
            BetaRule(BetaFamily.DY, dy_scale_eta=-0.1)

    def test_theorem_defaults(self):
        assert BetaRule.theorem_default("fr").fr_cap_xi == 0.9
        dy = BetaRule.theorem_default("dy", c=0.1)
        assert dy.dy_scale_eta == pytest.approx(0.5 * 0.9 / 1.1)
        assert dy.dy_scale_eta < dy_eta_bound(0.1)
        assert BetaRule.theorem_default("hs").clamp_nonneg

    def test_dy_eta_without_convexity(self):
        assert default_dy_eta(None) == 0.0


class TestComputeBeta:
    """The five beta families and their modifiers."""

    def test_fr(self):
        assert compute_beta(BetaRule(BetaFamily.FR), inputs()) == 0.5

    def test_fr_cap(self):
        assert compute_beta(BetaRule(BetaFamily.FR, fr_cap_xi=0.9), inputs()) == pytest.approx(0.45)

    def test_prp_clamped(self):
        assert raw_beta(BetaFamily.PRP, inputs()) == pytest.approx(-0.25)
        assert compute_beta(BetaRule(BetaFamily.PRP), inputs()) == 0.0

    def test_dy_scaled(self):
        assert raw_beta(BetaFamily.DY, inputs()) == pytest.approx(2.0 / 3.0)
        rule = BetaRule(BetaFamily.DY, dy_scale_eta=0.3)
        assert compute_beta(rule, inputs()) == pytest.approx(0.2)

    def test_cd(self):
        assert compute_beta(BetaRule(BetaFamily.CD), inputs()) == pytest.approx(0.5)

    def test_cd_non_positive_restarts(self):
        assert compute_beta(BetaRule(BetaFamily.CD), inputs(psi_km1_dkm1=1.0)) == 0.0

    def test_hs(self):
        # (1 - 1.5) / (-0.5 + 2) clamps to zero
        assert compute_beta(BetaRule(BetaFamily.HS), inputs()) == 0.0
        assert compute_beta(BetaRule(BetaFamily.HS), inputs(psi_km1_vk=-0.4)) == pytest.approx(0.4)

    @pytest.mark.parametrize("family", list(BetaFamily))
    def test_degenerate_denominator_restarts(self, family):
        degenerate = inputs(psi_km1_vkm1=0.0, psi_km1_dkm1=0.0, psi_k_dkm1=0.0)
        rule = BetaRule(family)
        assert compute_beta(rule, degenerate) == 0.0

    def test_single_objective_reduction(self):
        g_k, g_km1 = np.array([2.0]), np.array([1.0])
        assert raw_beta(BetaFamily.FR, scalar_inputs(g_k, g_km1)) == 4.0

    def test_classical_fr_and_prp(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            g_k, g_km1 = rng.normal(size=(2, 5))
            data = scalar_inputs(g_k, g_km1)
            fr = (g_k @ g_k) / (g_km1 @ g_km1)
            prp = g_k @ (g_k - g_km1) / (g_km1 @ g_km1)
            assert raw_beta(BetaFamily.FR, data) == pytest.approx(fr, rel=1e-12)
            assert raw_beta(BetaFamily.PRP, data) == pytest.approx(prp, rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize("family", list(BetaFamily))
    def test_fr_cap_bound(self, family):
        rng = np.random.default_rng(1)
        rule = BetaRule(family, fr_cap_xi=0.7)
        for _ in range(100):
            data = inputs(
                psi_k_vk=-rng.uniform(0.1, 2.0),
                psi_km1_vkm1=-rng.uniform(0.1, 2.0),
                psi_km1_dkm1=-rng.uniform(0.1, 2.0),
                psi_k_dkm1=rng.normal(),
                psi_km1_vk=rng.normal(),
            )
            assert abs(compute_beta(rule, data)) <= 0.7 * fr_value(data) + 1e-15


class TestUpdateDirection:
    def test_first_iteration(self):
        assert_allclose(update_direction(np.array([-1.0, 2.0]), 0.7, None, 0), [-1.0, 2.0])

    def test_restart(self):
        d = update_direction(np.array([-1.0, 2.0]), 0.0, np.array([5.0, 5.0]), 3)
        assert_allclose(d, [-1.0, 2.0])

    def test_combination(self):
        d = update_direction(np.array([-1.0, 0.0]), 0.5, np.array([2.0, 2.0]), 1)
        assert_allclose(d, [0.0, 1.0])

    def test_missing_previous_direction(self):
        with pytest.raises(DirectionError):
            update_direction(np.array([-1.0, 0.0]), 0.5, None, 2)


class TestDescentGuard:
    @pytest.mark.parametrize(
        "psi_d, expected",
        [(-0.3, GuardDecision.KEEP), (0.1, GuardDecision.RESTART), (0.0, GuardDecision.RESTART)],
    )
    def test_decisions(self, psi_d, expected):
        assert descent_guard(psi_d, -1.0) == expected

    def test_disabled(self):
        assert descent_guard(0.1, -1.0, GuardPolicy.OFF) == GuardDecision.KEEP

    def test_critical_iterate_rejected(self):
        with pytest.raises(DirectionError):
            descent_guard(-0.1, 0.0)
