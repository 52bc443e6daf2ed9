"""Safe intercept guidance amid defender engagement zones.

Simulation library and CLI for a planar attacker that must reach a target
while staying clear of range-limited defenders.  The public surface:

- :mod:`ezguide.geometry` - zone boundary radius, gradient, clearances
- :mod:`ezguide.aggregation` - soft-min aggregation of clearances
- :mod:`ezguide.guidance` - blended pursuit/avoidance control with
  smooth input saturation
- :mod:`ezguide.simulate` - closed-loop runs and Monte-Carlo sweeps
- :mod:`ezguide.scenario_io` - scenario files, CSV logs, summaries, SVG plots
- :mod:`ezguide.cli` - ``ezguide`` command-line entry point
"""

from .geometry import AttackerState, DefenderSpec
from .guidance import GuidanceParams
from .simulate import Outcome, Scenario, TrajectoryLog, run_scenario

__version__ = "0.1.0"

__all__ = [
    "AttackerState",
    "DefenderSpec",
    "GuidanceParams",
    "Outcome",
    "Scenario",
    "TrajectoryLog",
    "run_scenario",
    "__version__",
]
