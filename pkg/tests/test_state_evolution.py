import math

import numpy as np
import pytest
from scipy.special import ndtr

from sparselab import (
    CustomPrior,
    SEConfig,
    ThreePointPrior,
    lasso_asymptotic_risk,
    minimax_soft,
    phase_boundary,
    se_fixed_point,
    se_map,
    se_trace,
)

M01 = 0.3287935054536304  # M(0.1), frozen in test_shrinkage by two routes
ELL01 = 1.1401711702816288


def _cfg(delta=0.5, eps=0.1, sigma2=0.04, kappa=ELL01, amplitude=1.0):
    return SEConfig(delta, eps, sigma2, kappa, ThreePointPrior(amplitude))


def _phi(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


class TestSeMap:
    def test_zero_tau_returns_sigma2(self):
        assert se_map(_cfg(sigma2=0.7), 0.0) == 0.7
        assert se_map(_cfg(sigma2=0.0), 0.0) == 0.0

    def test_all_mass_at_zero_closed_form(self):
        # with a vanishing-signal prior the map is linear in tau^2
        kappa = 1.3
        cfg = SEConfig(0.5, 1e-10, 0.25, kappa, ThreePointPrior(1.0))
        for tau2 in (0.1, 1.0, 7.5):
            expected = 0.25 + (tau2 / 0.5) * (
                2 * (1 + kappa**2) * ndtr(-kappa) - 2 * kappa * _phi(kappa)
            )
            assert se_map(cfg, tau2) == pytest.approx(expected, abs=1e-8)

    def test_huge_kappa_keeps_signal_energy(self):
        cfg = _cfg(kappa=50.0, amplitude=2.0)
        tau2 = 0.3
        expected = cfg.sigma2 + 0.1 * 4.0 / cfg.delta
        assert se_map(cfg, tau2) == pytest.approx(expected, rel=1e-6)

    @pytest.mark.parametrize("tau2", [0.05, 0.4, 2.0, 30.0])
    @pytest.mark.parametrize("amplitude", [0.5, 3.0, 100.0])
    def test_quadrature_route_matches_exact(self, tau2, amplitude):
        cfg = _cfg(amplitude=amplitude, kappa=1.2)
        exact = se_map(cfg, tau2, method="exact")
        quad = se_map(cfg, tau2, method="quadrature")
        assert quad == pytest.approx(exact, abs=1e-10 * max(1.0, exact))

    def test_infinite_amplitude_is_linear_map(self):
        cfg = _cfg(amplitude=math.inf, kappa=ELL01, sigma2=1.0)
        for tau2 in (0.5, 2.0, 8.0):
            expected = 1.0 + tau2 * M01 / cfg.delta
            assert se_map(cfg, tau2) == pytest.approx(expected, rel=1e-10)

    def test_noise_floor_additivity(self):
        base = _cfg(sigma2=0.0)
        lifted = _cfg(sigma2=1.7)
        for tau2 in (0.2, 1.0, 5.0):
            assert se_map(lifted, tau2) - 1.7 == pytest.approx(
                se_map(base, tau2), rel=1e-12
            )

    def test_monotone_in_tau2(self):
        for amplitude in (0.5, 2.0, 20.0):
            cfg = _cfg(amplitude=amplitude)
            grid = np.linspace(0.0, 10.0, 60)
            vals = [se_map(cfg, t) for t in grid]
            assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_scale_covariance(self):
        c = 3.0
        cfg1 = _cfg(amplitude=2.0, sigma2=0.0)
        cfgc = _cfg(amplitude=2.0 * c, sigma2=0.0)
        for tau2 in (0.3, 1.0, 4.0):
            assert se_map(cfgc, c * c * tau2) == pytest.approx(
                c * c * se_map(cfg1, tau2), rel=1e-10
            )

    def test_custom_prior(self):
        prior = CustomPrior([0.0, 1.0, -1.0], [0.8, 0.1, 0.1])
        cfg = SEConfig(0.5, 0.2, 0.0, 1.0, prior)
        three = SEConfig(0.5, 0.2, 0.0, 1.0, ThreePointPrior(1.0))
        assert se_map(cfg, 1.0) == pytest.approx(se_map(three, 1.0), rel=1e-12)

    def test_negative_tau2_rejected(self):
        with pytest.raises(ValueError):
            se_map(_cfg(), -0.1)


class TestSeTrace:
    def test_default_start_is_first_iterate_from_zero(self):
        cfg = _cfg(amplitude=2.0)
        trace = se_trace(cfg, T=1)
        assert trace.tau2[0] == pytest.approx(cfg.sigma2 + 0.1 * 4.0 / 0.5)

    def test_noiseless_supercritical_contracts_to_zero(self):
        # delta > M(0.1): tau^2 collapses geometrically (rate <= M/delta)
        cfg = SEConfig(0.5, 0.1, 0.0, ELL01, ThreePointPrior(1e6))
        trace = se_trace(cfg, T=200)
        assert trace.tau2[-1] <= 1e-8 * trace.tau2[0]

    def test_noiseless_subcritical_stays_away_from_zero(self):
        cfg = SEConfig(0.85 * M01, 0.1, 0.0, ELL01, ThreePointPrior(10.0))
        trace = se_trace(cfg, T=400)
        assert trace.tau2[-1] >= 1.0

    def test_monotone_decreasing_once_contracting(self):
        cfg = SEConfig(0.5, 0.1, 0.0, ELL01, ThreePointPrior(5.0))
        trace = se_trace(cfg, T=100)
        diffs = np.diff(trace.tau2)
        assert np.all(diffs <= 1e-12)

    def test_tau2_floor_is_sigma2(self):
        cfg = _cfg(sigma2=0.3, amplitude=4.0)
        trace = se_trace(cfg, T=50)
        assert all(t >= 0.3 - 1e-12 for t in trace.tau2[1:])

    def test_worst_case_subcritical_diverges_upward(self):
        cfg = SEConfig(0.85 * M01, 0.1, 0.0, ELL01, ThreePointPrior(math.inf))
        trace = se_trace(cfg, T=50, tau2_0=1.0)
        assert trace.tau2[-1] > trace.tau2[0]
        assert not trace.converged

    def test_infinite_prior_requires_explicit_start(self):
        cfg = _cfg(amplitude=math.inf)
        with pytest.raises(ValueError):
            se_trace(cfg, T=10)

    def test_convergence_flag_and_fixed_point(self):
        cfg = _cfg(amplitude=3.0)
        trace = se_trace(cfg, T=2000)
        assert trace.converged
        assert trace.fixed_point == pytest.approx(
            se_map(cfg, trace.fixed_point), rel=1e-9
        )


class TestAsymptoticRisk:
    def test_noiseless_supercritical_is_zero(self):
        assert lasso_asymptotic_risk(0.1, 0.5, 0.0) == 0.0

    def test_subcritical_is_infinite(self):
        assert lasso_asymptotic_risk(0.1, 0.9 * M01, 1.0) == math.inf
        assert lasso_asymptotic_risk(0.1, 0.999 * M01, 1.0) == math.inf

    def test_formula_value(self):
        got = lasso_asymptotic_risk(0.1, 0.5, 1.0)
        assert got == pytest.approx(M01 / (0.5 - M01), rel=1e-7)

    def test_cross_check_against_fixed_point(self):
        # SE with the worst-case prior at the minimax threshold has a fixed
        # point whose excess over sigma^2 is exactly the formula
        eps, delta, sigma2 = 0.1, 0.5, 1.0
        cfg = SEConfig(delta, eps, sigma2, minimax_soft(eps).ell, ThreePointPrior(math.inf))
        tau2_star = se_fixed_point(cfg, tau2_0=sigma2 + 1.0)
        excess = tau2_star - sigma2
        assert excess == pytest.approx(lasso_asymptotic_risk(eps, delta, sigma2), rel=0.02)


class TestPhaseBoundary:
    def test_monotone_and_contained(self):
        grid = [0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 0.9]
        curve = phase_boundary(grid)
        deltas = [d for _, d in curve]
        assert all(a < b for a, b in zip(deltas, deltas[1:]))
        assert all(0 < d < 1 for d in deltas)

    def test_small_eps_value_frozen(self):
        # ratio to 2 eps log(1/eps) at eps=1e-3 is 0.6846 (see ledger)
        (_, d), = phase_boundary([1e-3])
        assert d == pytest.approx(0.0094579615, abs=1e-8)

    def test_dense_limit_needs_full_sampling(self):
        (_, d), = phase_boundary([0.99])
        assert abs(d - 1.0) <= 0.05


class TestValidation:
    def test_config_rejects_bad_values(self):
        with pytest.raises(ValueError):
            SEConfig(0.0, 0.1, 0.0, 1.0, ThreePointPrior(1.0))
        with pytest.raises(ValueError):
            SEConfig(0.5, 1.0, 0.0, 1.0, ThreePointPrior(1.0))
        with pytest.raises(ValueError):
            SEConfig(0.5, 0.1, -1.0, 1.0, ThreePointPrior(1.0))
        with pytest.raises(ValueError):
            SEConfig(0.5, 0.1, 0.0, 0.0, ThreePointPrior(1.0))

    def test_custom_prior_mass_checked(self):
        with pytest.raises(ValueError):
            CustomPrior([0.0, 1.0], [0.5, 0.6])
