"""Simulation and statistical verification toolkit for one-dimensional
random walks in i.i.d. random environments (transient, zero-speed regime).

Closed-form quenched moments, exact seeded Monte Carlo with a compiled
stepping core, ladder-block machinery, heavy-tail estimators, and a CLI of
reproducible verification campaigns.
"""

from .environment import Environment, sample_environment
from .kernels import BACKEND
from .ladders import LadderIndex, block_iid_check, ladder_locations
from .laws import EnvLaw, StabilityReport, solve_stability_index
from .quenched import (CrossingStats, block_crossing_stats, crossing_variance,
                       exit_probability, expected_crossing, expected_hitting,
                       hitting_oracle, hitting_variance, return_probability)
from .subseq import (GaussianWindow, LocalizationHit, SubseqPlan, build_plan,
                     detect_flat_window, detect_localization, gaussian_window,
                     plant_gaussian_window)
from .walk import (CoupledSample, HitSample, PositionSample, position_at,
                   simulate_coupled, simulate_hit)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CoupledSample", "CrossingStats", "EnvLaw", "Environment",
    "GaussianWindow", "HitSample", "LadderIndex", "LocalizationHit",
    "PositionSample", "StabilityReport", "SubseqPlan", "block_crossing_stats",
    "block_iid_check", "build_plan", "crossing_variance", "detect_flat_window",
    "detect_localization", "exit_probability", "expected_crossing",
    "expected_hitting", "gaussian_window", "hitting_oracle",
    "hitting_variance", "ladder_locations", "plant_gaussian_window",
    "position_at", "return_probability", "sample_environment",
    "simulate_coupled", "simulate_hit", "solve_stability_index",
]
