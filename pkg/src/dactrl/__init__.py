"""Adaptive neural tracking control with desired-trajectory approximation.

Library + CLI for simulating SISO nonlinear plants with state-dependent
input gain under three adaptive neural control schemes, and for
numerically verifying the performance guarantees they come with.
"""

from .controllers import ControllerGains, ControllerState
from .errors import (ConfigError, DactrlError, DomainError, FitError,
                     GainSignError, InvalidFilterError, InvalidPlanError,
                     LemmaHypothesisError, NumericBlowupError, ShapeError,
                     TraceFormatError)
from .plant import PlantModel, builtin_plant
from .rbf_net import IdealFit, RbfNetwork
from .scenario import Scenario, parse_scenario, parse_scenario_text, scenario_to_toml
from .sim_engine import SimTrace, run_closed_loop
from .trajectory import DesiredTrajectory, ErrorTrajectoryPlan

__version__ = "0.1.0"
