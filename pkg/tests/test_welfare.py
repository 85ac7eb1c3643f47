"""Welfare evaluation, concavity condition, first best, and policy gains."""

import numpy as np
import pytest

from occseg.equilibrium import ProfileKind, solve_partial, solve_symmetric
from occseg.errors import SingularSupplyError
from occseg.model import ModelParams, StrategyProfile, market_state
from occseg.welfare import (
    concavity_condition,
    first_best,
    integration_gain,
    maximin_gain,
    welfare,
    welfare_components,
    welfare_report,
)

# .95 * U(40000): welfare of complete segregation at alpha = 1/2.
W_COMPLETE_HALF = 0.9326001430557025


class TestWelfareFunction:
    def test_relabeling_symmetry(self, calibrated):
        par = calibrated.with_alpha(0.65)
        rng = np.random.default_rng(30)
        for _ in range(50):
            a, b = rng.uniform(0, 1, 2)
            w1 = welfare(StrategyProfile(a, b), par)
            w2 = welfare(StrategyProfile(b, a), par)
            assert w1 == pytest.approx(w2, rel=1e-14)

    def test_complete_segregation_value(self, calibrated):
        w = welfare(StrategyProfile(1, 0), calibrated)
        assert w == pytest.approx(W_COMPLETE_HALF, rel=1e-14)
        assert w == welfare(StrategyProfile(0, 1), calibrated)

    def test_mixing_is_dominated_at_alpha_half(self, calibrated):
        assert welfare(StrategyProfile(0.5, 0.5), calibrated) < welfare(
            StrategyProfile(1, 0), calibrated
        )

    def test_formulations_agree_at_random_profiles(self, calibrated):
        par = calibrated.with_alpha(0.68)
        rng = np.random.default_rng(31)
        for _ in range(200):
            prof = StrategyProfile(*rng.uniform(0, 1, 2))
            if prof.as_tuple() in ((0.0, 0.0), (1.0, 1.0)):
                continue
            by_payoffs, by_supplies = welfare_components(prof, par)
            scale = max(abs(by_payoffs), abs(by_supplies))
            assert abs(by_payoffs - by_supplies) <= 1e-10 * scale

    def test_singular_profiles_propagate(self, calibrated):
        with pytest.raises(SingularSupplyError):
            welfare(StrategyProfile(0, 0), calibrated)


class TestConcavityCondition:
    def test_calibrated_parameters_pass(self, calibrated):
        # c1*lam = 14.25 < 2*(1+c0) = 21
        assert concavity_condition(calibrated)

    def test_fails_for_strong_homophily(self):
        par = ModelParams.from_products(c0=9.5, c1_pk=4.75, c1_lam=30.0)
        assert not concavity_condition(par)

    def test_matches_closed_form_reduction(self):
        # for the rational employment function the condition collapses to
        # c1*lam < 2*(1+c0), the x = 0 corner of the grid
        rng = np.random.default_rng(32)
        for _ in range(50):
            c0 = rng.uniform(0.5, 20.0)
            c1_lam = rng.uniform(0.1, 60.0)
            par = ModelParams.from_products(c0=c0, c1_pk=4.75, c1_lam=c1_lam)
            assert concavity_condition(par) == (c1_lam < 2 * (1 + c0))

    def test_weak_network_term_passes(self):
        par = ModelParams.from_products(c0=9.5, c1_pk=4.75, c1_lam=1e-3)
        assert concavity_condition(par)


class TestFirstBest:
    def test_symmetric_alpha_ties_at_both_corners(self, calibrated):
        fb = first_best(calibrated, grid_n=200)
        assert fb.profile.as_tuple() == (0.0, 1.0)  # lexicographically first
        tie_profiles = {t.as_tuple() for t in fb.ties}
        assert tie_profiles == {(0.0, 1.0), (1.0, 0.0)}
        w1 = welfare(StrategyProfile(1, 0), calibrated)
        w2 = welfare(StrategyProfile(0, 1), calibrated)
        assert abs(w1 - fb.value) <= 1e-10 * fb.value
        assert abs(w2 - fb.value) <= 1e-10 * fb.value

    def test_optimum_is_segregated_above_half(self, calibrated):
        fb = first_best(calibrated.with_alpha(0.7), grid_n=200)
        mu_R, mu_G = fb.profile.as_tuple()
        assert mu_R in (0.0, 1.0) or mu_G in (0.0, 1.0)
        assert fb.kind in (
            ProfileKind.COMPLETE_SEGREGATION,
            ProfileKind.PARTIAL_SEGREGATION,
        )

    def test_never_interior_when_concavity_holds(self, calibrated):
        for alpha in (0.5, 0.6, 0.8):
            par = calibrated.with_alpha(alpha)
            assert concavity_condition(par)
            fb = first_best(par, grid_n=200)
            mu_R, mu_G = fb.profile.as_tuple()
            assert mu_R in (0.0, 1.0) or mu_G in (0.0, 1.0)

    def test_degenerate_homophily_reports_tie_ridge(self):
        # lam below the ulp of p leaves welfare a function of the mean share
        # only, so the optimizer must surface a ridge of ties
        par = ModelParams.from_products(c0=9.5, c1_pk=4.75, c1_lam=1e-300)
        fb = first_best(par, grid_n=200)
        assert len(fb.ties) > 10

    def test_paired_switch_never_improves(self, calibrated):
        # moving one worker of each group in opposite directions keeps the
        # mean share fixed; the optimum must not improve
        for alpha in (0.5, 0.7):
            par = calibrated.with_alpha(alpha)
            fb = first_best(par, grid_n=200)
            mu_R, mu_G = fb.profile.as_tuple()
            for delta in (1e-4, -1e-4):
                a = min(1.0, max(0.0, mu_R + delta))
                b = min(1.0, max(0.0, mu_G - delta))
                assert welfare(StrategyProfile(a, b), par) <= fb.value + 1e-12

    def test_grid_floor(self, calibrated):
        with pytest.raises(ValueError):
            first_best(calibrated, grid_n=100)


class TestIntegrationGain:
    @pytest.mark.parametrize("alpha", [0.5, 0.7])
    def test_negative_at_calibration(self, calibrated, alpha):
        assert integration_gain(calibrated.with_alpha(alpha)) < 0

    def test_vanishes_without_homophily(self):
        par = ModelParams.from_products(
            c0=9.5, c1_pk=4.75, c1_lam=1e-8, alpha=0.6
        )
        assert abs(integration_gain(par)) < 1e-4

    def test_recomputable_from_parts(self, calibrated):
        par = calibrated.with_alpha(0.66)
        mu_star = solve_partial(par)
        mu_sym = solve_symmetric(par)
        direct = (
            welfare(StrategyProfile(mu_sym, mu_sym), par)
            / welfare(StrategyProfile(1.0, mu_star), par)
            - 1.0
        )
        assert integration_gain(par) == pytest.approx(direct, rel=1e-12)


class TestMaximinGain:
    def test_positive_near_threshold(self, calibrated):
        assert maximin_gain(calibrated.with_alpha(0.60)) > 0

    def test_alpha_half_value_matches_direct_evaluation(self, calibrated):
        mu_sym = solve_symmetric(calibrated)
        worst_seg = market_state(StrategyProfile(1, 0), calibrated).Pi_BG
        worst_int = market_state(StrategyProfile(mu_sym, mu_sym), calibrated).Pi_BG
        assert maximin_gain(calibrated) == pytest.approx(
            worst_int / worst_seg - 1.0, rel=1e-12
        )

    def test_worst_off_is_green_payoff(self, calibrated):
        # with mu_R = 1 no Red works in B, so the lowest realized payoff is
        # the common Green payoff
        par = calibrated.with_alpha(0.7)
        st = market_state(StrategyProfile(1, solve_partial(par)), par)
        realized = [st.Pi_AR, st.Pi_AG, st.Pi_BG]
        assert min(realized) == pytest.approx(st.Pi_BG, abs=1e-12)


class TestWelfareReport:
    def test_report_consistency(self, calibrated):
        par = calibrated.with_alpha(0.7)
        rep = welfare_report(par, grid_n=200)
        assert rep.integration_gain_I == pytest.approx(
            integration_gain(par), rel=1e-12
        )
        assert rep.maximin_gain == pytest.approx(maximin_gain(par), rel=1e-12)
        assert rep.concavity_condition_holds
        assert rep.symmetric_multiplicity == 1
        assert rep.W_value == pytest.approx(
            welfare(StrategyProfile(1.0, rep.mu_star), par), rel=1e-12
        )
