import math

import numpy as np
import pytest

from dactrl.controllers import (ControllerGains, ControllerState,
                                control_u_da, control_u_da2,
                                incremental_adaptation_step,
                                integral_adaptation_rhs, lipschitz_gain_step,
                                robust_gain_rho, smooth_robust_gain)
from dactrl.errors import ConfigError, ShapeError


def _gains(**kw):
    return ControllerGains(**kw)


def _state(w_f, w_g=None, tau_steps=1, l_f0=0.0, l_g0=0.0):
    w_f = np.asarray(w_f, float)
    w_g = w_f.copy() if w_g is None else np.asarray(w_g, float)
    return ControllerState(w_f.shape[0], tau_steps, w_f0=w_f, w_g0=w_g,
                           l_f0=l_f0, l_g0=l_g0)


class TestRobustGain:
    def test_bound_terms_only(self):
        assert robust_gain_rho(1.0, 2.0, 3.0, 0.0, 0.5) == 7.0

    def test_error_term(self):
        assert robust_gain_rho(0.5, 0.0, 0.0, 0.4, 0.1) == pytest.approx(1.5)

    def test_all_zero(self):
        assert robust_gain_rho(0.0, 0.0, 17.0, 0.0, 2.0) == 0.0

    def test_rejects_bad_eta(self):
        with pytest.raises(ConfigError):
            robust_gain_rho(1.0, 1.0, 1.0, 1.0, 0.0)


class TestControlUDa:
    def test_all_terms_vanish(self):
        state = _state([0.0, 0.0])
        u = control_u_da(0.0, 1.0, 0.5, [0.5, 0.5], [0.5, 0.5], state,
                         _gains(kappa=2.0))
        assert u == 0.0

    def test_kappa_term_only(self):
        state = _state([0.0])
        u = control_u_da(1.0, 0.0, 0.0, [1.0], [1.0], state,
                         _gains(kappa=2.0, eps_rho=1.0))
        assert u == -2.0

    def test_smooth_term_value(self):
        state = _state([0.0])
        u = control_u_da(1.0, 1.0, 0.0, [1.0], [1.0], state,
                         _gains(kappa=1e-300, eps_rho=1.0))
        assert u == pytest.approx(-1.0 / math.sqrt(2.0), rel=1e-12)

    def test_shape_mismatch(self):
        state = _state([0.0, 0.0])
        with pytest.raises(ShapeError):
            control_u_da(1.0, 1.0, 0.0, [1.0], [1.0], state, _gains())


class TestSmoothRobustInequality:
    def test_key_inequality_on_random_triples(self):
        # slack of the differentiable surrogate never exceeds eps
        rng = np.random.default_rng(2024)
        n = 100_000
        et = rng.uniform(-10.0, 10.0, n)
        rho = rng.uniform(0.0, 100.0, n)
        eps = 10.0 ** rng.uniform(-6.0, 1.0, n)
        x2 = et * et * rho * rho
        term = x2 / np.sqrt(x2 + eps * eps)
        slack = -term + np.abs(et) * rho
        assert np.all(term >= 0.0)
        assert np.all(slack <= eps)

    def test_vanishes_with_error(self):
        assert smooth_robust_gain(0.0, 3.0, 0.5) * 0.0 == 0.0

    def test_term_bounded_by_rho(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            et = rng.uniform(-5, 5)
            rho = rng.uniform(0, 10)
            eps = rng.uniform(1e-6, 1.0)
            assert abs(et * smooth_robust_gain(et, rho, eps)) <= rho + 1e-12


class TestIntegralAdaptation:
    def test_zero_error_zero_leak(self):
        rhs = integral_adaptation_rhs([1.0, -2.0], [0.3, 0.4], 0.0, 1.0, 1.0, 0.0)
        assert np.array_equal(rhs, [0.0, 0.0])

    def test_identity_gain(self):
        rhs = integral_adaptation_rhs([0.0], [2.0], 0.5, 1.0, 1.0, 0.0)
        assert np.array_equal(rhs, [1.0])

    def test_pure_leakage(self):
        rhs = integral_adaptation_rhs([3.0], [0.0], 0.0, 1.0, 2.0, 1.0)
        assert np.array_equal(rhs, [-6.0])

    def test_leakage_decays_weight_norm(self):
        # with the error held at zero only the leak acts
        w = np.array([2.0, -1.0, 0.5])
        gamma, sigma, h = 2.0, 0.1, 0.01
        norms = [np.linalg.norm(w)]
        for _ in range(200):
            w = w + h * integral_adaptation_rhs(w, np.zeros(3), 0.0, 1.0, gamma, sigma)
            norms.append(np.linalg.norm(w))
        assert all(b < a for a, b in zip(norms, norms[1:]))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            integral_adaptation_rhs([1.0, 2.0], [1.0], 0.0, 1.0, 1.0, 0.0)


class TestIncrementalAdaptation:
    def test_direct_formula(self):
        state = _state([1.0])
        gains = _gains(sigma_f=1e-300, sigma_g=1e-300, gamma_f=1.0, gamma_g=1.0)
        w_f, _ = incremental_adaptation_step(state, [2.0], [0.0], 0.5, 0.0, gains)
        assert w_f[0] == pytest.approx(2.0, rel=1e-12)

    def test_unit_sigma_gamma(self):
        state = _state([1.0])
        gains = _gains(sigma_f=1.0, sigma_g=1.0, gamma_f=1.0, gamma_g=1.0)
        w_f, _ = incremental_adaptation_step(state, [2.0], [0.0], 0.5, 0.0, gains)
        assert w_f[0] == pytest.approx(1.0, rel=1e-12)  # (1+1) w = 1 + 1

    def test_hold_when_error_zero(self):
        state = _state([1.5, -0.5])
        gains = _gains(sigma_f=1e-300, sigma_g=1e-300)
        w_f, w_g = incremental_adaptation_step(state, [1.0, 1.0], [1.0, 1.0],
                                               0.0, 3.0, gains)
        assert np.array_equal(w_f, [1.5, -0.5])
        assert np.array_equal(w_g, [1.5, -0.5])

    def test_defining_relation_to_machine_precision(self):
        rng = np.random.default_rng(9)
        gains = _gains(sigma_f=0.03, sigma_g=0.05, gamma_f=4.0, gamma_g=2.5)
        state = ControllerState(6, 3)
        for _ in range(50):
            s_f = rng.uniform(0.0, 1.0, 6)
            s_g = rng.uniform(0.0, 1.0, 6)
            et, nu = rng.normal(), rng.normal()
            wf_del, wg_del, _, _ = state.delayed()
            w_f, w_g = incremental_adaptation_step(state, s_f, s_g, et, nu, gains)
            rf = (1 + gains.sigma_f * gains.gamma_f) * w_f - wf_del \
                - gains.gamma_f * et * s_f
            rg = (1 + gains.sigma_g * gains.gamma_g) * w_g - wg_del \
                - gains.gamma_g * et * nu * s_g
            assert np.max(np.abs(rf)) < 1e-12
            assert np.max(np.abs(rg)) < 1e-12
            state.commit()

    def test_prehistory_returns_initial_estimate(self):
        w0 = np.array([0.7, -0.2])
        state = ControllerState(2, 4, w_f0=w0, w_g0=w0)
        gains = _gains()
        for step in range(4):
            wf_del, _, _, _ = state.delayed()
            assert np.array_equal(wf_del, w0)  # lookups before t = tau
            incremental_adaptation_step(state, [0.1, 0.1], [0.1, 0.1], 0.3,
                                        0.5, gains)
            state.commit()
        wf_del, _, _, _ = state.delayed()
        assert not np.array_equal(wf_del, w0)  # now one full period back

    def test_history_depth(self):
        state = ControllerState(3, 10)
        assert state.history_depth == 11


class TestLipschitzGainStep:
    def test_direct_formula(self):
        state = _state([0.0], tau_steps=1, l_f0=0.2)
        gains = _gains(gamma_lf=1.0, sigma_lf=1e-300)
        l_f, _ = lipschitz_gain_step(state, 0.5, 2.0, 0.0, 1.0, 1.0, gains)
        assert l_f == pytest.approx(1.2, rel=1e-12)

    def test_hold_when_error_zero(self):
        state = _state([0.0], l_f0=0.4, l_g0=0.7)
        gains = _gains(sigma_lf=1e-300, sigma_lg=1e-300)
        l_f, l_g = lipschitz_gain_step(state, 0.0, 5.0, 2.0, 1.0, 1.0, gains)
        assert l_f == 0.4 and l_g == 0.7

    def test_unit_sigma_gamma(self):
        state = _state([0.0], l_f0=1.0)
        gains = _gains(gamma_lf=1.0, sigma_lf=1.0)
        # correction of exactly 1: (1+1) l = 1 + 1
        l_f, _ = lipschitz_gain_step(state, 1.0, 1.0, 0.0, 1.0, 1.0, gains)
        assert l_f == pytest.approx(1.0, rel=1e-12)

    def test_estimates_stay_nonnegative(self):
        rng = np.random.default_rng(3)
        state = _state([0.0], tau_steps=2)
        gains = _gains()
        for _ in range(100):
            lipschitz_gain_step(state, rng.normal(), abs(rng.normal()),
                                rng.normal(), abs(rng.normal()), abs(rng.normal()),
                                gains)
            state.commit()
            assert state.l_f_hat >= 0.0 and state.l_g_hat >= 0.0


class TestControlUDa2:
    def test_all_terms_vanish(self):
        state = _state([0.0, 0.0])
        u = control_u_da2(0.0, 0.0, [1.0, 1.0], [1.0, 1.0], 0.0, 1.0, 1.0,
                          state, _gains())
        assert u == 0.0

    def test_kappa_plus_eta_feedback(self):
        state = _state([0.0])
        gains = _gains(kappa=1.0, eta_f=0.25, eta_g=0.25)
        u = control_u_da2(1.0, 0.0, [1.0], [1.0], 0.0, 1.0, 1.0, state, gains)
        assert u == -2.0

    def test_smooth_term_value(self):
        state = _state([0.0], l_f0=1.0, l_g0=0.0)
        gains = _gains(kappa=1e-300, eps_rho=1.0, eta_f=1e6, eta_g=1e6)
        u = control_u_da2(1.0, 0.0, [1.0], [1.0], 1.0, 1.0, 1.0, state, gains)
        assert u == pytest.approx(-1.0 / math.sqrt(2.0), rel=1e-5)

    def test_shape_mismatch(self):
        state = _state([0.0, 0.0])
        with pytest.raises(ShapeError):
            control_u_da2(1.0, 0.0, [1.0], [1.0], 1.0, 1.0, 1.0, state, _gains())


class TestGainValidation:
    def test_positive_gains_pass(self):
        _gains().validate()

    @pytest.mark.parametrize("field", ["kappa", "eps_rho", "eta", "sigma_f",
                                       "tau", "gamma_lf", "sigma_lg"])
    def test_nonpositive_scalar_rejected(self, field):
        with pytest.raises(ConfigError):
            _gains(**{field: 0.0}).validate()

    def test_nonpositive_gamma_rejected(self):
        with pytest.raises(ConfigError):
            _gains(gamma_f=-1.0).validate()

    def test_eta_split_defaults(self):
        g = _gains(eta=0.5)
        assert g.eta_f_resolved == 0.5 and g.eta_g_resolved == 0.5
        g = _gains(eta=0.5, eta_f=0.3, eta_g=0.9)
        assert g.eta_f_resolved == 0.3 and g.eta_g_resolved == 0.9
