"""Reference trajectory bundles and the desired filtered-error curve.

A reference is a scalar signal y_d(t) together with its first n analytic
derivatives; the bundle also records the box spanned by those derivatives
over the simulation horizon, which is where the basis-function networks
are trained.  The desired filtered-error curve e*_f(t) blends the initial
filtered error down to zero by a settling moment ``delta`` through a C^2
quintic profile, so its derivative is continuous everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, InvalidPlanError

__all__ = [
    "DesiredTrajectory",
    "ErrorTrajectoryPlan",
    "ReferenceSpec",
    "zeta",
    "zeta_dot",
    "desired_filtered_error",
    "make_reference",
]


@dataclass(frozen=True)
class DesiredTrajectory:
    """y_d and its first n derivatives as callables of time.

    ``derivs`` holds n+1 vectorized callables [y_d, y_d', ..., y_d^(n)].
    ``omega_d_box`` is an (n+1, 2) array of per-derivative [min, max]
    bounds over ``[0, horizon]``.  The first n rows span the compact set
    the desired state x_d = [y_d, ..., y_d^(n-1)] lives in.
    """

    n: int
    derivs: tuple
    omega_d_box: np.ndarray
    horizon: float

    @property
    def state_box(self) -> np.ndarray:
        """Bounds of the desired state vector x_d (first n derivatives)."""
        return self.omega_d_box[: self.n]

    def x_d(self, t: float) -> np.ndarray:
        """Desired state vector [y_d(t), ..., y_d^(n-1)(t)]."""
        return np.array([float(d(t)) for d in self.derivs[: self.n]])

    def x_d_table(self, times: np.ndarray) -> np.ndarray:
        """(len(times), n) table of desired states."""
        return np.column_stack([np.broadcast_to(d(times), times.shape)
                                for d in self.derivs[: self.n]])

    def y_dn(self, t):
        """n-th derivative of the reference (feedforward term)."""
        return self.derivs[self.n](t)


@dataclass(frozen=True)
class ErrorTrajectoryPlan:
    """Designer curve from the initial filtered error down to zero.

    e*_f(t) = e_f0 * zeta(t) with zeta the quintic blend: zeta(0) = 1,
    zeta(t) = 0 for t >= delta, non-increasing and C^2 at both ends.
    """

    e_f0: float
    delta: float
    zeta_kind: str = "quintic"

    def __post_init__(self):
        if self.delta <= 0.0:
            raise InvalidPlanError(f"settling moment must be positive, got {self.delta}")
        if self.zeta_kind != "quintic":
            raise InvalidPlanError(f"unknown smoothing profile {self.zeta_kind!r}")


def zeta(t, delta):
    """Descending quintic smoothstep: 1 at t=0, exactly 0 for t >= delta.

    C^2 everywhere (zeta'(0) = zeta'(delta) = 0), non-increasing on
    [0, delta].  Accepts scalar or array ``t`` (t >= 0).
    """
    if delta <= 0.0:
        raise InvalidPlanError(f"settling moment must be positive, got {delta}")
    u = np.clip(np.asarray(t, dtype=float) / delta, 0.0, 1.0)
    out = 1.0 - u**3 * (10.0 - 15.0 * u + 6.0 * u * u)
    return out if out.ndim else float(out)


def zeta_dot(t, delta):
    """Time derivative of :func:`zeta`; exactly 0 for t >= delta."""
    if delta <= 0.0:
        raise InvalidPlanError(f"settling moment must be positive, got {delta}")
    u = np.clip(np.asarray(t, dtype=float) / delta, 0.0, 1.0)
    out = -30.0 * u * u * (1.0 - u) ** 2 / delta
    return out if out.ndim else float(out)


def desired_filtered_error(plan: ErrorTrajectoryPlan, t):
    """Evaluate (e*_f(t), d/dt e*_f(t)) for a plan.

    Satisfies e*_f(0) = plan.e_f0 and e*_f = de*_f = 0 for t >= delta
    (exact zeros, not just small values).
    """
    return (plan.e_f0 * zeta(t, plan.delta),
            plan.e_f0 * zeta_dot(t, plan.delta))


@dataclass(frozen=True)
class ReferenceSpec:
    """Parameters of a supported reference family.

    family: "sinusoid" (terms = [(amp, omega, phase), ...]),
    "polynomial" (coeffs ascending) or "constant" (value).
    """

    family: str
    n: int
    horizon: float
    h: float
    terms: tuple = ()
    coeffs: tuple = ()
    value: float = 0.0


def _sinusoid_deriv(terms, k):
    # k-th derivative of sum a*sin(w t + p) is sum a*w^k*sin(w t + p + k*pi/2)
    shift = k * math.pi / 2.0

    def d(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for a, w, p in terms:
            out = out + a * w**k * np.sin(w * t + p + shift)
        return out

    return d


def _poly_deriv(coeffs, k):
    p = np.polynomial.Polynomial(list(coeffs)).deriv(k) if k else \
        np.polynomial.Polynomial(list(coeffs))

    def d(t):
        return p(np.asarray(t, dtype=float))

    return d


def _const_deriv(value, k):
    c = float(value) if k == 0 else 0.0

    def d(t):
        return np.full_like(np.asarray(t, dtype=float), c)

    return d


def make_reference(spec: ReferenceSpec) -> DesiredTrajectory:
    """Build a trajectory bundle with analytic derivatives.

    The bounds box is computed by dense sampling of [0, horizon] at step
    h/10, which is adequate for basis-center placement.
    """
    if spec.n < 1:
        raise ConfigError(f"system order must be >= 1, got {spec.n}")
    if spec.horizon <= 0.0 or spec.h <= 0.0:
        raise ConfigError("horizon and step must be positive")

    if spec.family == "sinusoid":
        if not spec.terms:
            raise ConfigError("sinusoid reference needs at least one (amp, omega, phase) term")
        derivs = tuple(_sinusoid_deriv(spec.terms, k) for k in range(spec.n + 1))
    elif spec.family == "polynomial":
        if not spec.coeffs:
            raise ConfigError("polynomial reference needs coefficients")
        derivs = tuple(_poly_deriv(spec.coeffs, k) for k in range(spec.n + 1))
    elif spec.family == "constant":
        derivs = tuple(_const_deriv(spec.value, k) for k in range(spec.n + 1))
    else:
        raise ConfigError(f"unsupported reference family {spec.family!r}")

    ts = np.arange(0.0, spec.horizon + spec.h / 20.0, spec.h / 10.0)
    box = np.empty((spec.n + 1, 2))
    for k, d in enumerate(derivs):
        vals = np.broadcast_to(d(ts), ts.shape)
        box[k] = (vals.min(), vals.max())

    return DesiredTrajectory(n=spec.n, derivs=derivs, omega_d_box=box,
                             horizon=spec.horizon)
