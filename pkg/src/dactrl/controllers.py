"""Control laws and parameter-adaptation rules for the three schemes.

Scheme A pairs the smooth-robust control law with integral weight
adaptation (weights integrated as extra ODE state).  Scheme B keeps the
same control law but replaces the integral laws with algebraic updates
relating the estimate at t to the estimate at t - tau.  Scheme C drops
the known difference bounds: it learns the Lipschitz-type constants with
the same delayed update shape and folds the estimates into the robust
gain.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError

__all__ = [
    "ControllerGains",
    "ControllerState",
    "robust_gain_rho",
    "smooth_robust_gain",
    "control_u_da",
    "integral_adaptation_rhs",
    "incremental_adaptation_step",
    "lipschitz_gain_step",
    "control_u_da2",
    "u_da2_smooth_gain",
]


@dataclass
class ControllerGains:
    """Adjustable design constants shared by the three schemes.

    eps_rho doubles as the smooth-term constant of scheme C.  eta_f/eta_g
    default to eta when unset (scheme C splits them).  gamma_* accept a
    scalar (uniform diagonal) or a per-node vector.
    """

    kappa: float = 4.0
    eps_rho: float = 0.01
    eta: float = 0.5
    gamma_f: float = 5.0
    gamma_g: float = 5.0
    sigma_f: float = 0.01
    sigma_g: float = 0.01
    tau: float = 0.01
    eta_f: float | None = None
    eta_g: float | None = None
    gamma_lf: float = 1.0
    gamma_lg: float = 1.0
    sigma_lf: float = 0.01
    sigma_lg: float = 0.01

    def validate(self):
        scalars = {
            "kappa": self.kappa, "eps_rho": self.eps_rho, "eta": self.eta,
            "sigma_f": self.sigma_f, "sigma_g": self.sigma_g, "tau": self.tau,
            "gamma_lf": self.gamma_lf, "gamma_lg": self.gamma_lg,
            "sigma_lf": self.sigma_lf, "sigma_lg": self.sigma_lg,
            "eta_f": self.eta_f_resolved, "eta_g": self.eta_g_resolved,
        }
        for name, value in scalars.items():
            if not value > 0.0:
                raise ConfigError(f"controller gain {name} must be positive, got {value}")
        for name, value in (("gamma_f", self.gamma_f), ("gamma_g", self.gamma_g)):
            if np.any(np.asarray(value, dtype=float) <= 0.0):
                raise ConfigError(f"adaptation gain {name} must be positive")

    @property
    def eta_f_resolved(self) -> float:
        return self.eta if self.eta_f is None else self.eta_f

    @property
    def eta_g_resolved(self) -> float:
        return self.eta if self.eta_g is None else self.eta_g


class ControllerState:
    """Estimates plus the delayed-value buffers the algebraic laws need.

    The buffers hold the last tau/h committed values, so together with
    the current estimate the state spans tau/h + 1 grid points.  Lookups
    earlier than the first update return the initial estimate.
    """

    def __init__(self, n_nodes: int, tau_steps: int, w_f0=None, w_g0=None,
                 l_f0: float = 0.0, l_g0: float = 0.0):
        if tau_steps < 1:
            raise ConfigError(f"tau must span at least one step, got {tau_steps}")
        self.n_nodes = n_nodes
        self.tau_steps = tau_steps
        self.w_f = np.zeros(n_nodes) if w_f0 is None else np.asarray(w_f0, float).copy()
        self.w_g = np.zeros(n_nodes) if w_g0 is None else np.asarray(w_g0, float).copy()
        self.l_f_hat = float(l_f0)
        self.l_g_hat = float(l_g0)
        self._wf_hist = deque([self.w_f.copy() for _ in range(tau_steps)], maxlen=tau_steps)
        self._wg_hist = deque([self.w_g.copy() for _ in range(tau_steps)], maxlen=tau_steps)
        self._lf_hist = deque([self.l_f_hat] * tau_steps, maxlen=tau_steps)
        self._lg_hist = deque([self.l_g_hat] * tau_steps, maxlen=tau_steps)

    @property
    def history_depth(self) -> int:
        return self.tau_steps + 1

    def delayed(self):
        """Estimates one full learning period back."""
        return self._wf_hist[0], self._wg_hist[0], self._lf_hist[0], self._lg_hist[0]

    def commit(self):
        """Record the current estimates as this step's committed values."""
        self._wf_hist.append(self.w_f.copy())
        self._wg_hist.append(self.w_g.copy())
        self._lf_hist.append(self.l_f_hat)
        self._lg_hist.append(self.l_g_hat)


def robust_gain_rho(lf_b: float, lg_b: float, nu: float, e_tilde: float,
                    eta: float) -> float:
    """Robust gain built from the known difference bounds."""
    if eta <= 0.0:
        raise ConfigError(f"eta must be positive, got {eta}")
    return lf_b + lg_b * abs(nu) + abs(e_tilde) * (1.0 + nu * nu) / (4.0 * eta)


def smooth_robust_gain(e_tilde: float, rho: float, eps: float) -> float:
    """Gain of the differentiable surrogate for sign-type robust control.

    Multiplied by -e_tilde in the control law; the slack it leaves
    against |e_tilde| * rho never exceeds eps.
    """
    return rho * rho / math.sqrt(e_tilde * e_tilde * rho * rho + eps * eps)


def control_u_da(e_tilde: float, rho: float, nu: float, s_f, s_g,
                 state: ControllerState, gains: ControllerGains) -> float:
    """Control law for schemes A and B."""
    s_f = np.asarray(s_f, dtype=float)
    s_g = np.asarray(s_g, dtype=float)
    if s_f.shape != state.w_f.shape or s_g.shape != state.w_g.shape:
        raise ShapeError("basis vectors do not match weight estimates")
    return (-e_tilde * (smooth_robust_gain(e_tilde, rho, gains.eps_rho) + gains.kappa)
            - float(state.w_f @ s_f)
            - float(state.w_g @ s_g) * nu)


def integral_adaptation_rhs(w_hat, s, e_tilde: float, nu_or_one: float,
                            gamma, sigma: float) -> np.ndarray:
    """Right-hand side of the integral adaptation ODE (scheme A).

    nu_or_one is 1 for the drift network and nu for the gain network.
    """
    w_hat = np.asarray(w_hat, dtype=float)
    s = np.asarray(s, dtype=float)
    if w_hat.shape != s.shape:
        raise ShapeError("basis vector does not match weight estimate")
    return np.asarray(gamma, dtype=float) * (s * (e_tilde * nu_or_one) - sigma * w_hat)


def incremental_adaptation_step(state: ControllerState, s_f, s_g,
                                e_tilde: float, nu: float,
                                gains: ControllerGains):
    """Delayed algebraic weight update (schemes B and C).

    Solves (1 + sigma * Gamma) W(t) = W(t - tau) + Gamma * e_tilde * S
    elementwise (Gamma is diagonal) and commits the result.
    """
    s_f = np.asarray(s_f, dtype=float)
    s_g = np.asarray(s_g, dtype=float)
    if s_f.shape != state.w_f.shape or s_g.shape != state.w_g.shape:
        raise ShapeError("basis vectors do not match weight estimates")
    wf_del, wg_del, _, _ = state.delayed()
    gf = np.asarray(gains.gamma_f, dtype=float)
    gg = np.asarray(gains.gamma_g, dtype=float)
    state.w_f = (wf_del + gf * e_tilde * s_f) / (1.0 + gains.sigma_f * gf)
    state.w_g = (wg_del + gg * (e_tilde * nu) * s_g) / (1.0 + gains.sigma_g * gg)
    return state.w_f, state.w_g


def lipschitz_gain_step(state: ControllerState, e_tilde: float, e_norm: float,
                        nu: float, hbar_f: float, hbar_g: float,
                        gains: ControllerGains):
    """Delayed update of the difference-constant estimates (scheme C).

    Every term is nonnegative, so the estimates stay nonnegative for
    nonnegative initialization.
    """
    _, _, lf_del, lg_del = state.delayed()
    corr_f = gains.gamma_lf * abs(e_tilde) * e_norm * hbar_f
    corr_g = gains.gamma_lg * abs(nu) * abs(e_tilde) * e_norm * hbar_g
    state.l_f_hat = (lf_del + corr_f) / (1.0 + gains.sigma_lf * gains.gamma_lf)
    state.l_g_hat = (lg_del + corr_g) / (1.0 + gains.sigma_lg * gains.gamma_lg)
    return state.l_f_hat, state.l_g_hat


def control_u_da2(e_tilde: float, nu: float, s_f, s_g, e_norm: float,
                  hbar_f: float, hbar_g: float, state: ControllerState,
                  gains: ControllerGains) -> float:
    """Control law for scheme C (learned difference constants)."""
    s_f = np.asarray(s_f, dtype=float)
    s_g = np.asarray(s_g, dtype=float)
    if s_f.shape != state.w_f.shape or s_g.shape != state.w_g.shape:
        raise ShapeError("basis vectors do not match weight estimates")
    varsigma = state.l_f_hat * hbar_f + state.l_g_hat * abs(nu) * hbar_g
    smooth = u_da2_smooth_gain(e_tilde, varsigma, e_norm, gains.eps_rho)
    feedback = (smooth + gains.kappa + 1.0 / (4.0 * gains.eta_f_resolved)
                + nu * nu / (4.0 * gains.eta_g_resolved))
    return (-e_tilde * feedback
            - float(state.w_f @ s_f)
            - float(state.w_g @ s_g) * nu)


def u_da2_smooth_gain(e_tilde: float, varsigma: float, e_norm: float,
                      eps: float) -> float:
    """Smooth-robust gain of scheme C's control law."""
    q = varsigma * varsigma * e_norm * e_norm
    return q / math.sqrt(q * e_tilde * e_tilde + eps * eps)
