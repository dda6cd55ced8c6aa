"""Shared scenario builders for the test suite."""

from dactrl.controllers import ControllerGains
from dactrl.scenario import ReferenceConfig, Scenario

NOMINAL_GAINS = dict(kappa=4.0, eps_rho=0.01, eta=0.5, gamma_f=5.0, gamma_g=5.0,
                     sigma_f=0.01, sigma_g=0.01, tau=0.01,
                     gamma_lf=1.0, gamma_lg=1.0, sigma_lf=0.01, sigma_lg=0.01)


def nominal_scenario(variant="B", **overrides):
    """P1 + unit sinusoid reference at the gains the acceptance suite pins."""
    gain_overrides = {k: overrides.pop(k) for k in list(overrides)
                      if k in NOMINAL_GAINS or k in ("eta_f", "eta_g")}
    base = dict(
        plant_name="P1",
        x0=(0.8, 0.3),
        reference=ReferenceConfig("sinusoid", terms=((1.0, 1.0, 0.0),)),
        lam=(2.0,),
        variant=variant,
        gains=ControllerGains(**{**NOMINAL_GAINS, **gain_overrides}),
        per_axis=7,
        h=1e-3,
        horizon=10.0,
        delta=1.0,
        seed=0,
    )
    base.update(overrides)
    return Scenario(**base)


def equilibrium_scenario():
    """Zero reference from zero state: the closed loop sits at a fixed point."""
    return nominal_scenario("B", x0=(0.0, 0.0),
                            reference=ReferenceConfig("constant", value=0.0),
                            horizon=2.0)
