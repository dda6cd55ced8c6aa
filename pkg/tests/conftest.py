from types import SimpleNamespace

import pytest

from dactrl import analysis
from dactrl.sim_engine import build_setup, run_closed_loop
from util import equilibrium_scenario, nominal_scenario


@pytest.fixture(scope="session")
def nominal_runs():
    """One full run + fits + bound report per controller variant."""
    runs = {}
    for variant in ("A", "B", "C"):
        scenario = nominal_scenario(variant)
        setup = build_setup(scenario)
        trace = run_closed_loop(scenario)
        inputs = analysis.prepare_report_inputs(setup)
        report = analysis.check_theorem_bounds(trace, inputs, variant)
        runs[variant] = SimpleNamespace(scenario=scenario, setup=setup,
                                        trace=trace, inputs=inputs, report=report)
    return runs


@pytest.fixture(scope="session")
def equilibrium_run():
    scenario = equilibrium_scenario()
    setup = build_setup(scenario)
    trace = run_closed_loop(scenario)
    inputs = analysis.prepare_report_inputs(setup)
    report = analysis.check_theorem_bounds(trace, inputs, scenario.variant)
    return SimpleNamespace(scenario=scenario, setup=setup, trace=trace,
                           inputs=inputs, report=report)
