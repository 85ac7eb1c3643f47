"""Closed-form layer: tie probabilities, employment, supplies, wages,
utility, payoffs, and the structural invariants they must satisfy."""

import math

import numpy as np
import pytest

from occseg.errors import SingularSupplyError
from occseg.model import (
    CARA,
    CobbDouglas,
    ModelParams,
    StrategyProfile,
    check_assumptions,
    employment_prob,
    group_employment_rates,
    labor_supplies,
    market_state,
    payoff_gaps,
    tie_probability,
    utility,
    wage_gap,
    wages,
)

# U(40000) with rho = 1e-4, i.e. 1 - exp(-4), to full double precision.
U_40K = 0.9816843611112658


def cell_friend_measure(profile, params, group, education):
    """Independent re-derivation of the friend measure: sum the tie
    probability against each same-education population cell's mass."""
    masses = {
        ("R", "A"): profile.mu_R / 2,
        ("R", "B"): (1 - profile.mu_R) / 2,
        ("G", "A"): profile.mu_G / 2,
        ("G", "B"): (1 - profile.mu_G) / 2,
    }
    x = 0.0
    for (g2, e2), mass in masses.items():
        if e2 != education:
            continue
        x += mass * tie_probability(g2 == group, True, params)
    return x


class TestTieProbability:
    def test_table_cells(self, calibrated):
        p, k, l = calibrated.p, calibrated.kappa, calibrated.lam
        assert tie_probability(True, True, calibrated) == p + k + l
        assert tie_probability(False, False, calibrated) == p
        assert tie_probability(True, False, calibrated) == p + l
        assert tie_probability(False, True, calibrated) == p + k


class TestEmploymentProb:
    def test_no_friends_matches_direct_search_rate(self, calibrated):
        assert employment_prob(0.0, calibrated) == pytest.approx(19 / 21, abs=1e-15)

    def test_calibrated_segregation_rate(self, calibrated):
        x = (calibrated.p + calibrated.kappa + calibrated.lam) / 2  # c1*x = 9.5
        assert employment_prob(x, calibrated) == pytest.approx(0.95, abs=1e-12)

    def test_calibrated_deviator_rate(self, calibrated):
        x = (calibrated.p + calibrated.kappa) / 2  # c1*x = 2.375
        assert employment_prob(x, calibrated) == pytest.approx(
            11.875 / 12.875, abs=1e-12
        )

    def test_strictly_increasing(self, calibrated):
        xs = np.linspace(0, 10, 50)
        vals = [employment_prob(float(x), calibrated) for x in xs]
        assert all(0 < v < 1 for v in vals)
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_negative_x_rejected(self, calibrated):
        with pytest.raises(ValueError):
            employment_prob(-1e-9, calibrated)


class TestGroupEmploymentRates:
    def test_complete_segregation_values(self, calibrated):
        s_AR, s_AG, s_BR, s_BG = group_employment_rates(
            StrategyProfile(1, 0), calibrated
        )
        assert s_AR == pytest.approx(0.95, abs=1e-12)
        assert s_BG == pytest.approx(0.95, abs=1e-12)
        assert s_BR == pytest.approx(0.9223300970873787, abs=1e-12)
        assert s_AG == pytest.approx(0.9223300970873787, abs=1e-12)

    def test_symmetric_profile_equalizes_groups(self, calibrated):
        for mu in (0.2, 0.5, 0.8):
            s_AR, s_AG, s_BR, s_BG = group_employment_rates(
                StrategyProfile(mu, mu), calibrated
            )
            assert s_AR == s_AG
            assert s_BR == s_BG

    def test_against_cell_integration_oracle(self, calibrated):
        profile = StrategyProfile(1.0, 0.3)
        s_AR, s_AG, s_BR, s_BG = group_employment_rates(profile, calibrated)
        got = {
            ("R", "A"): s_AR, ("G", "A"): s_AG,
            ("R", "B"): s_BR, ("G", "B"): s_BG,
        }
        for (g, e), s in got.items():
            x = cell_friend_measure(profile, calibrated, g, e)
            assert s == pytest.approx(employment_prob(x, calibrated), rel=1e-12)

    def test_ordering_follows_own_share(self, calibrated):
        # mu_X > mu_Y forces s_A^X > s_A^Y and s_B^X < s_B^Y whenever lam > 0
        rng = np.random.default_rng(11)
        for _ in range(100):
            mu_R, mu_G = rng.uniform(0, 1, 2)
            if abs(mu_R - mu_G) < 1e-9:
                continue
            s_AR, s_AG, s_BR, s_BG = group_employment_rates(
                StrategyProfile(mu_R, mu_G), calibrated
            )
            if mu_R > mu_G:
                assert s_AR > s_AG and s_BR < s_BG
            else:
                assert s_AR < s_AG and s_BR > s_BG

    def test_ordering_invariant_to_kappa(self):
        # the A-rate ordering depends on lam, never on kappa
        rng = np.random.default_rng(12)
        for _ in range(50):
            p, lam = rng.uniform(0.01, 0.2), rng.uniform(0.05, 0.5)
            mu_R, mu_G = rng.uniform(0, 1, 2)
            signs = set()
            for kappa in rng.uniform(0.0, 1.0 - p - lam, 5):
                par = ModelParams(
                    p=p, kappa=float(kappa), lam=lam, c0=9.5, c1=25.0,
                    theta=80_000.0, alpha=0.5, rho=1e-4,
                )
                s_AR, s_AG, _, _ = group_employment_rates(
                    StrategyProfile(mu_R, mu_G), par
                )
                signs.add(np.sign(s_AR - s_AG))
            assert len(signs) == 1


class TestLaborSupplies:
    def test_complete_segregation(self, calibrated):
        L_A, L_B = labor_supplies(StrategyProfile(1, 0), calibrated)
        assert L_A == pytest.approx(0.95 / 2, abs=1e-12)
        assert L_B == pytest.approx(0.95 / 2, abs=1e-12)

    def test_empty_sides(self, calibrated):
        assert labor_supplies(StrategyProfile(0, 0), calibrated)[0] == 0.0
        assert labor_supplies(StrategyProfile(1, 1), calibrated)[1] == 0.0

    def test_bounded_by_population_shares(self, calibrated):
        rng = np.random.default_rng(13)
        for _ in range(100):
            prof = StrategyProfile(*rng.uniform(0, 1, 2))
            L_A, L_B = labor_supplies(prof, calibrated)
            assert L_A <= prof.mu_bar + 1e-15
            assert L_B <= 1 - prof.mu_bar + 1e-15

    def test_monotone_in_shares_by_finite_differences(self, calibrated):
        h = 1e-6
        rng = np.random.default_rng(14)
        for _ in range(100):
            mu_R, mu_G = rng.uniform(2 * h, 1 - 2 * h, 2)
            for dim in (0, 1):
                up = [mu_R, mu_G]
                dn = [mu_R, mu_G]
                up[dim] += h
                dn[dim] -= h
                dL_A = (
                    labor_supplies(StrategyProfile(*up), calibrated)[0]
                    - labor_supplies(StrategyProfile(*dn), calibrated)[0]
                ) / (2 * h)
                dL_B = (
                    labor_supplies(StrategyProfile(*up), calibrated)[1]
                    - labor_supplies(StrategyProfile(*dn), calibrated)[1]
                ) / (2 * h)
                assert dL_A > 0
                assert dL_B < 0

    def test_second_order_cross_ordering_at_symmetric_profiles(self, calibrated):
        # own second derivative of L_A exceeds the cross derivative when
        # c1*lam < 2*(1+c0), by second-order central differences
        assert calibrated.c1_lam < 2 * (1 + calibrated.c0)
        h = 1e-4

        def L_A(mu_R, mu_G):
            return labor_supplies(StrategyProfile(mu_R, mu_G), calibrated)[0]

        for mu in (0.25, 0.5, 0.75):
            own = (L_A(mu + h, mu) - 2 * L_A(mu, mu) + L_A(mu - h, mu)) / h**2
            cross = (
                L_A(mu + h, mu + h)
                - L_A(mu + h, mu - h)
                - L_A(mu - h, mu + h)
                + L_A(mu - h, mu - h)
            ) / (4 * h**2)
            assert own > cross


class TestWages:
    def test_equal_supply_alpha_half(self, calibrated):
        w_A, w_B = wages(0.3, 0.3, calibrated)
        assert w_A == pytest.approx(40_000.0, abs=1e-9)
        assert w_B == pytest.approx(40_000.0, abs=1e-9)

    def test_complete_segregation_closed_form(self, calibrated):
        # equal effective supplies make the ratio exactly one
        for alpha in (0.5, 0.5904, 0.7):
            st = market_state(StrategyProfile(1, 0), calibrated.with_alpha(alpha))
            assert st.w_A == pytest.approx(80_000.0 * alpha, abs=1e-9)
            assert st.w_B == pytest.approx(80_000.0 * (1 - alpha), abs=1e-9)

    def test_paper_wage_levels_at_threshold(self, calibrated):
        st = market_state(StrategyProfile(1, 0), calibrated.with_alpha(0.5904))
        assert st.w_A == pytest.approx(47_233, abs=50)
        assert st.w_B == pytest.approx(32_767, abs=50)

    def test_singular_supply_raises(self, calibrated):
        with pytest.raises(SingularSupplyError):
            wages(0.0, 0.3, calibrated)
        with pytest.raises(SingularSupplyError):
            wages(0.3, 0.0, calibrated)

    def test_monotone_along_diagonal(self, calibrated):
        # raising both shares floods occupation A: w_A falls, w_B rises
        par = calibrated.with_alpha(0.6)
        mus = np.linspace(0.05, 0.95, 19)
        w = [market_state(StrategyProfile(m, m), par) for m in mus]
        assert all(b.w_A < a.w_A for a, b in zip(w, w[1:]))
        assert all(b.w_B > a.w_B for a, b in zip(w, w[1:]))


class TestUtility:
    def test_zero_wage_zero_utility(self, calibrated):
        assert utility(0.0, calibrated) == 0.0

    def test_frozen_value(self, calibrated):
        assert utility(40_000.0, calibrated) == pytest.approx(U_40K, abs=1e-15)

    def test_monotone_and_concave(self, calibrated):
        assert utility(47_233.0, calibrated) > utility(32_767.0, calibrated)
        ws = np.linspace(0, 100_000, 21)
        us = [utility(float(w), calibrated) for w in ws]
        diffs = np.diff(us)
        assert (diffs > 0).all()
        assert (np.diff(diffs) < 0).all()

    def test_negative_wage_rejected(self, calibrated):
        with pytest.raises(ValueError):
            utility(-1.0, calibrated)


class TestMarketState:
    def test_symmetric_profiles_equalize_group_gaps(self, calibrated):
        # groups are interchangeable at mu_R = mu_G; the gaps vanish only at
        # the fully symmetric point (.5, .5) where A and B also mirror
        for mu in (0.3, 0.5, 0.7):
            st = market_state(StrategyProfile(mu, mu), calibrated)
            assert st.dPi_R == st.dPi_G
        st = market_state(StrategyProfile(0.5, 0.5), calibrated)
        assert st.dPi_R == pytest.approx(0.0, abs=1e-15)
        assert st.dPi_G == pytest.approx(0.0, abs=1e-15)

    def test_green_gap_sign_flips_with_alpha(self, calibrated):
        assert market_state(StrategyProfile(1, 0), calibrated).dPi_G < 0
        assert market_state(StrategyProfile(1, 0), calibrated.with_alpha(0.7)).dPi_G > 0

    def test_gap_fields_exact(self, calibrated):
        st = market_state(StrategyProfile(0.8, 0.1), calibrated.with_alpha(0.62))
        assert st.dPi_R == st.Pi_AR - st.Pi_BR
        assert st.dPi_G == st.Pi_AG - st.Pi_BG

    def test_recompute_is_identical(self, calibrated):
        a = market_state(StrategyProfile(0.37, 0.81), calibrated)
        b = market_state(StrategyProfile(0.37, 0.81), calibrated)
        assert a == b

    def test_fast_gap_path_agrees(self, calibrated):
        rng = np.random.default_rng(15)
        for _ in range(50):
            mu_R, mu_G = rng.uniform(0.01, 0.99, 2)
            st = market_state(StrategyProfile(mu_R, mu_G), calibrated.with_alpha(0.63))
            g = payoff_gaps(mu_R, mu_G, calibrated.with_alpha(0.63))
            assert g[0] == pytest.approx(st.dPi_R, rel=1e-12, abs=1e-15)
            assert g[1] == pytest.approx(st.dPi_G, rel=1e-12, abs=1e-15)

    def test_singular_profiles_raise(self, calibrated):
        with pytest.raises(SingularSupplyError):
            market_state(StrategyProfile(0, 0), calibrated)
        with pytest.raises(SingularSupplyError):
            market_state(StrategyProfile(1, 1), calibrated)


class TestWageGap:
    def test_symmetric_jobs(self, calibrated):
        assert wage_gap(StrategyProfile(1, 0), calibrated) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_paper_value(self, calibrated):
        g = wage_gap(StrategyProfile(1, 0), calibrated.with_alpha(0.5904))
        assert g == pytest.approx(0.306, abs=2e-3)

    def test_closed_form(self, calibrated):
        g = wage_gap(StrategyProfile(1, 0), calibrated.with_alpha(0.55))
        assert g == pytest.approx(2 - 1 / 0.55, rel=1e-12)


class TestModelParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            ModelParams(p=-0.1, kappa=0, lam=0.5, c0=9.5, c1=25,
                        theta=80_000, alpha=0.5, rho=1e-4)
        with pytest.raises(ValueError):
            ModelParams(p=0.1, kappa=0, lam=0.0, c0=9.5, c1=25,
                        theta=80_000, alpha=0.5, rho=1e-4)
        with pytest.raises(ValueError):
            ModelParams(p=0.1, kappa=0, lam=0.5, c0=9.5, c1=25,
                        theta=80_000, alpha=1.0, rho=1e-4)

    def test_product_form_folds(self):
        par = ModelParams.from_products(c0=9.5, c1_pk=4.75, c1_lam=14.25)
        assert par.c1 == 1.0
        assert par.c1_pk == 4.75
        assert par.c1_lam == 14.25
        assert not par.has_physical_split
        assert par.s0 == pytest.approx(19 / 21, abs=1e-15)

    def test_physical_split_flag(self, split_params):
        assert split_params.has_physical_split

    def test_reduced_form_invariant_to_split(self, calibrated, split_params):
        # only the products enter the market equations
        prof = StrategyProfile(0.9, 0.25)
        a = market_state(prof, calibrated.with_alpha(0.6))
        b = market_state(prof, split_params.with_alpha(0.6))
        assert a.s_AR == pytest.approx(b.s_AR, rel=1e-12)
        assert a.w_A == pytest.approx(b.w_A, rel=1e-12)
        assert a.dPi_G == pytest.approx(b.dPi_G, rel=1e-12)

    def test_clamping(self):
        prof = StrategyProfile(-0.25, 1.75)
        assert prof.as_tuple() == (0.0, 1.0)
        assert StrategyProfile(0.25, 0.75).mu_bar == 0.5


class TestPluggableForms:
    def test_custom_production_and_utility(self, calibrated):
        prof = StrategyProfile(0.8, 0.2)
        st = market_state(
            prof,
            calibrated,
            production=CobbDouglas(40_000.0, 0.5),
            utility_fn=CARA(3e-4),
        )
        ref = market_state(prof, calibrated)
        assert st.w_A == pytest.approx(ref.w_A / 2, rel=1e-12)
        assert st.Pi_AR != ref.Pi_AR

    def test_linear_utility_plug_in(self, calibrated):
        class Linear:
            def __call__(self, w):
                return w

        st = market_state(StrategyProfile(1, 0), calibrated, utility_fn=Linear())
        assert st.Pi_AR == pytest.approx(0.95 * 40_000.0, rel=1e-12)


class TestAssumptions:
    def test_cara_never_satisfies_divergence(self, calibrated):
        diag = check_assumptions(calibrated, grid_n=7)
        assert diag.scarce_wage_utility_diverges is False

    def test_elasticity_condition_violated_at_calibration(self, calibrated):
        # the calibrated parameters violate the second assumption; solvers
        # must not (and do not) rely on it
        diag = check_assumptions(calibrated.with_alpha(0.7), grid_n=7)
        assert diag.elasticity_condition_holds is False
        assert diag.elasticity_violations > 0
