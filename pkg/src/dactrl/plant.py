"""SISO benchmark plants in controllable canonical form.

Each plant is g(x) * x_n' = f(x) + u with integrator chain above, plus the
difference-bound metadata the controllers rely on: a known bound on
|f(x) - f(x_d)| (and the same for g), and the factored form
l * ||x - x_d|| * hbar(x, x_d) whose constant l stays hidden from the
controller and is only used for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, GainSignError

__all__ = ["PlantModel", "plant_derivative", "builtin_plant", "BUILTIN_PLANTS"]


@dataclass(frozen=True)
class PlantModel:
    name: str
    n: int
    f: Callable[[np.ndarray], float]
    g: Callable[[np.ndarray], float]
    lf_bound: Callable[[np.ndarray, np.ndarray], float]
    lg_bound: Callable[[np.ndarray, np.ndarray], float]
    hbar_f: Callable[[np.ndarray, np.ndarray], float]
    hbar_g: Callable[[np.ndarray, np.ndarray], float]
    lf_true: float   # held out for verification, not visible to controllers
    lg_true: float
    g_min: float     # analytic lower bound of g, used for config validation


def plant_derivative(model: PlantModel, x: np.ndarray, u: float) -> np.ndarray:
    """State derivative of the canonical-form plant.

    Audits the gain sign on every call (so every integrator substep);
    a non-positive gain aborts the run rather than dividing through.
    """
    x = np.asarray(x, dtype=float)
    g = float(model.g(x))
    if g <= 0.0:
        raise GainSignError(f"plant {model.name}: gain {g:.6g} <= 0 at state {x.tolist()}")
    dx = np.empty_like(x)
    dx[:-1] = x[1:]
    dx[-1] = (float(model.f(x)) + u) / g
    return dx


def _diff_norm(x, x_d):
    d = np.asarray(x, float) - np.asarray(x_d, float)
    return math.sqrt(float(d @ d))


def _one(x, x_d):
    return 1.0


def _make_p1(drift_scale=1.0, gain_offset=0.0):
    # f = 0.5 sin(x1) + 0.3 tanh(x2): globally Lipschitz with constant 0.8.
    # g = 2 + cos(x1) >= 1: Lipschitz with constant 1.
    s = drift_scale

    def f(x):
        return s * (0.5 * math.sin(x[0]) + 0.3 * math.tanh(x[1]))

    def g(x):
        return 2.0 + math.cos(x[0]) + gain_offset

    lf = 0.8 * s
    return PlantModel(
        name="P1", n=2, f=f, g=g,
        lf_bound=lambda x, xd: lf * _diff_norm(x, xd),
        lg_bound=_diff_norm,
        hbar_f=_one, hbar_g=_one,
        lf_true=lf, lg_true=1.0, g_min=1.0 + gain_offset,
    )


def _make_p2(drift_scale=1.0, gain_offset=0.0):
    # Third-order variant, same gain shape.
    s = drift_scale

    def f(x):
        return s * (0.4 * math.sin(x[0]) + 0.3 * math.tanh(x[1]) + 0.3 * math.sin(x[2]))

    def g(x):
        return 2.0 + math.cos(x[0]) + gain_offset

    lf = 1.0 * s
    return PlantModel(
        name="P2", n=3, f=f, g=g,
        lf_bound=lambda x, xd: lf * _diff_norm(x, xd),
        lg_bound=_diff_norm,
        hbar_f=_one, hbar_g=_one,
        lf_true=lf, lg_true=1.0, g_min=1.0 + gain_offset,
    )


def _make_p3(drift_scale=1.0, gain_offset=0.0):
    # Stronger gain variation: g = 1.5 + 0.4 sin(x1*x2) in [1.1, 1.9].
    # sin(x1*x2) is not globally Lipschitz in x, so the factored bound
    # carries the state growth in hbar_g instead of the constant.
    s = drift_scale

    def f(x):
        return s * (0.5 * math.sin(x[0]) + 0.3 * math.tanh(x[1]))

    def g(x):
        return 1.5 + 0.4 * math.sin(x[0] * x[1]) + gain_offset

    def lg_bound(x, xd):
        return 0.4 * abs(float(x[0]) * float(x[1]) - float(xd[0]) * float(xd[1]))

    def hbar_g(x, xd):
        m = max(np.max(np.abs(np.asarray(x, float))), np.max(np.abs(np.asarray(xd, float))))
        return math.sqrt(2.0) * (1.0 + m)

    lf = 0.8 * s
    return PlantModel(
        name="P3", n=2, f=f, g=g,
        lf_bound=lambda x, xd: lf * _diff_norm(x, xd),
        lg_bound=lg_bound,
        hbar_f=_one, hbar_g=hbar_g,
        lf_true=lf, lg_true=0.4, g_min=1.1 + gain_offset,
    )


BUILTIN_PLANTS = {"P1": _make_p1, "P2": _make_p2, "P3": _make_p3}


def builtin_plant(name: str, drift_scale: float = 1.0, gain_offset: float = 0.0) -> PlantModel:
    """Construct a named benchmark plant, optionally rescaled.

    ``drift_scale`` multiplies f (the difference bounds scale with it);
    ``gain_offset`` shifts g and must keep it positive.
    """
    if name not in BUILTIN_PLANTS:
        raise ConfigError(f"unknown plant {name!r}; choose one of {sorted(BUILTIN_PLANTS)}")
    if drift_scale <= 0.0:
        raise ConfigError(f"drift_scale must be positive, got {drift_scale}")
    model = BUILTIN_PLANTS[name](drift_scale=drift_scale, gain_offset=gain_offset)
    if model.g_min <= 0.0:
        raise ConfigError(f"gain_offset {gain_offset} drives the gain of {name} non-positive")
    return model
