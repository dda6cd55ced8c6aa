"""Scenario configuration: parsing, validation, serialization.

A scenario is one closed-loop run fully specified in a TOML file:
plant + initial state, reference, filter coefficients, controller variant
and gains, network sizing, and integration parameters.  Everything is
validated up front so a run can only fail for numerical reasons.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, asdict

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .controllers import ControllerGains
from .errors import ConfigError
from .error_geometry import check_hurwitz, hurwitz_coeffs
from .plant import builtin_plant
from .trajectory import ReferenceSpec, make_reference

__all__ = ["ReferenceConfig", "Scenario", "parse_scenario", "parse_scenario_text",
           "scenario_to_toml", "validate_scenario", "SWEEPABLE_AXES"]

VARIANTS = ("A", "B", "C")

# Scalar scenario fields the sweep runner may vary.
SWEEPABLE_AXES = (
    "kappa", "eps_rho", "eta", "gamma_f", "gamma_g", "sigma_f", "sigma_g",
    "tau", "gamma_lf", "gamma_lg", "sigma_lf", "sigma_lg", "delta", "per_axis",
)


@dataclass(frozen=True)
class ReferenceConfig:
    family: str
    terms: tuple = ()    # sinusoid: ((amp, omega, phase), ...)
    coeffs: tuple = ()   # polynomial: ascending coefficients
    value: float = 0.0   # constant


@dataclass
class Scenario:
    plant_name: str = "P1"
    x0: tuple = (0.0, 0.0)
    drift_scale: float = 1.0
    gain_offset: float = 0.0
    reference: ReferenceConfig = field(default_factory=lambda: ReferenceConfig("constant"))
    lam: tuple = (2.0,)
    variant: str = "B"
    gains: ControllerGains = field(default_factory=ControllerGains)
    per_axis: int = 7
    h: float = 1e-3
    horizon: float = 10.0
    delta: float = 1.0
    seed: int = 0
    fit_grid_step: float = 0.01
    report_overrides: dict = field(default_factory=dict)

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.h))

    @property
    def tau_steps(self) -> int:
        return int(round(self.gains.tau / self.h))


def validate_scenario(s: Scenario) -> Scenario:
    """Check the scenario as a whole; raises ConfigError with a reason."""
    plant = builtin_plant(s.plant_name, s.drift_scale, s.gain_offset)
    if len(s.x0) != plant.n:
        raise ConfigError(f"x0 has {len(s.x0)} entries, plant {s.plant_name} has order {plant.n}")
    if len(s.lam) != plant.n - 1:
        raise ConfigError(f"filter needs {plant.n - 1} coefficients for order {plant.n}, "
                          f"got {len(s.lam)}")
    if not check_hurwitz(s.lam):
        poly = " + ".join(f"({c:g}) s^{k}" for k, c in
                          enumerate(hurwitz_coeffs(s.lam)[::-1]))
        raise ConfigError(f"filter polynomial {poly} is not Hurwitz")
    if s.variant not in VARIANTS:
        raise ConfigError(f"controller variant must be one of {VARIANTS}, got {s.variant!r}")
    s.gains.validate()
    if s.h <= 0.0 or s.horizon <= 0.0:
        raise ConfigError("h and horizon must be positive")
    if s.n_steps < 1 or abs(s.n_steps * s.h - s.horizon) > 1e-9 * max(1.0, s.horizon):
        raise ConfigError(f"horizon {s.horizon} is not an integer number of steps of {s.h}")
    m = s.gains.tau / s.h
    if abs(m - round(m)) > 1e-9 or round(m) < 1:
        raise ConfigError(f"tau = {s.gains.tau} must be a positive integer multiple of h = {s.h}")
    if not 0.0 < s.delta < s.horizon:
        raise ConfigError(f"delta must lie in (0, horizon), got {s.delta}")
    if s.per_axis < 2:
        raise ConfigError(f"per_axis must be >= 2, got {s.per_axis}")
    if s.fit_grid_step <= 0.0:
        raise ConfigError("fit_grid_step must be positive")
    for key in s.report_overrides:
        if key not in SWEEPABLE_AXES:
            raise ConfigError(f"unknown report override {key!r}")
    # Constructing the reference validates the family spec.
    make_reference(reference_spec(s, plant.n))
    return s


def reference_spec(s: Scenario, n: int) -> ReferenceSpec:
    return ReferenceSpec(family=s.reference.family, n=n, horizon=s.horizon,
                         h=s.h, terms=s.reference.terms,
                         coeffs=s.reference.coeffs, value=s.reference.value)


def set_axis(s: Scenario, axis: str, value: float) -> Scenario:
    """Return a copy of the scenario with one sweepable scalar replaced."""
    if axis not in SWEEPABLE_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose one of {SWEEPABLE_AXES}")
    text = scenario_to_toml(s)
    out = parse_scenario_text(text)
    if axis == "delta":
        out.delta = float(value)
    elif axis == "per_axis":
        if abs(value - round(value)) > 1e-12:
            raise ConfigError(f"per_axis must be an integer, got {value}")
        out.per_axis = int(round(value))
    else:
        setattr(out.gains, axis, float(value))
    return out


# ---------------------------------------------------------------------------
# TOML I/O

def _tuple2(rows):
    return tuple(tuple(float(v) for v in row) for row in rows)


def parse_scenario_text(text: str) -> Scenario:
    try:
        data = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    return _scenario_from_dict(data)


def parse_scenario(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_scenario_text(text)


def _take(table: dict, key, default=None, required=False):
    if required and key not in table:
        raise ConfigError(f"missing required config key {key!r}")
    return table.get(key, default)


def _scenario_from_dict(data: dict) -> Scenario:
    for section in data:
        if section not in ("plant", "reference", "filter", "controller",
                           "network", "sim", "verify"):
            raise ConfigError(f"unknown config section [{section}]")
    plant_tbl = data.get("plant", {})
    ref_tbl = data.get("reference", {})
    filt_tbl = data.get("filter", {})
    ctrl_tbl = dict(data.get("controller", {}))
    net_tbl = data.get("network", {})
    sim_tbl = data.get("sim", {})
    verify_tbl = data.get("verify", {})

    family = _take(ref_tbl, "family", required=True)
    reference = ReferenceConfig(
        family=str(family),
        terms=_tuple2(ref_tbl.get("terms", ())),
        coeffs=tuple(float(v) for v in ref_tbl.get("coeffs", ())),
        value=float(ref_tbl.get("value", 0.0)),
    )

    variant = str(_take(ctrl_tbl, "variant", default="B"))
    ctrl_tbl.pop("variant", None)
    known = set(ControllerGains.__dataclass_fields__)
    unknown = set(ctrl_tbl) - known
    if unknown:
        raise ConfigError(f"unknown controller keys: {sorted(unknown)}")
    gains = ControllerGains(**{k: float(v) for k, v in ctrl_tbl.items()})

    overrides = {str(k): float(v) for k, v in verify_tbl.get("report_overrides", {}).items()}

    return Scenario(
        plant_name=str(_take(plant_tbl, "name", required=True)),
        x0=tuple(float(v) for v in _take(plant_tbl, "x0", required=True)),
        drift_scale=float(plant_tbl.get("drift_scale", 1.0)),
        gain_offset=float(plant_tbl.get("gain_offset", 0.0)),
        reference=reference,
        lam=tuple(float(v) for v in filt_tbl.get("lam", ())),
        variant=variant,
        gains=gains,
        per_axis=int(net_tbl.get("per_axis", 7)),
        h=float(sim_tbl.get("h", 1e-3)),
        horizon=float(sim_tbl.get("horizon", 10.0)),
        delta=float(sim_tbl.get("delta", 1.0)),
        seed=int(sim_tbl.get("seed", 0)),
        fit_grid_step=float(sim_tbl.get("fit_grid_step", 0.01)),
        report_overrides=overrides,
    )


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {value!r}")


def scenario_to_toml(s: Scenario) -> str:
    """Serialize so that parse(serialize(s)) reproduces s exactly."""
    g = s.gains
    lines = [
        "[plant]",
        f"name = {_fmt(s.plant_name)}",
        f"x0 = {_fmt(list(s.x0))}",
        f"drift_scale = {_fmt(s.drift_scale)}",
        f"gain_offset = {_fmt(s.gain_offset)}",
        "",
        "[reference]",
        f"family = {_fmt(s.reference.family)}",
    ]
    if s.reference.family == "sinusoid":
        lines.append(f"terms = {_fmt([list(t) for t in s.reference.terms])}")
    elif s.reference.family == "polynomial":
        lines.append(f"coeffs = {_fmt(list(s.reference.coeffs))}")
    elif s.reference.family == "constant":
        lines.append(f"value = {_fmt(s.reference.value)}")
    lines += [
        "",
        "[filter]",
        f"lam = {_fmt(list(s.lam))}",
        "",
        "[controller]",
        f"variant = {_fmt(s.variant)}",
        f"kappa = {_fmt(g.kappa)}",
        f"eps_rho = {_fmt(g.eps_rho)}",
        f"eta = {_fmt(g.eta)}",
        f"gamma_f = {_fmt(float(g.gamma_f))}",
        f"gamma_g = {_fmt(float(g.gamma_g))}",
        f"sigma_f = {_fmt(g.sigma_f)}",
        f"sigma_g = {_fmt(g.sigma_g)}",
        f"tau = {_fmt(g.tau)}",
    ]
    if g.eta_f is not None:
        lines.append(f"eta_f = {_fmt(g.eta_f)}")
    if g.eta_g is not None:
        lines.append(f"eta_g = {_fmt(g.eta_g)}")
    lines += [
        f"gamma_lf = {_fmt(g.gamma_lf)}",
        f"gamma_lg = {_fmt(g.gamma_lg)}",
        f"sigma_lf = {_fmt(g.sigma_lf)}",
        f"sigma_lg = {_fmt(g.sigma_lg)}",
        "",
        "[network]",
        f"per_axis = {_fmt(s.per_axis)}",
        "",
        "[sim]",
        f"h = {_fmt(s.h)}",
        f"horizon = {_fmt(s.horizon)}",
        f"delta = {_fmt(s.delta)}",
        f"seed = {_fmt(s.seed)}",
        f"fit_grid_step = {_fmt(s.fit_grid_step)}",
    ]
    if s.report_overrides:
        lines += ["", "[verify]", "[verify.report_overrides]"]
        lines += [f"{k} = {_fmt(v)}" for k, v in sorted(s.report_overrides.items())]
    return "\n".join(lines) + "\n"
