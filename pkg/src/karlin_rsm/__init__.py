"""Karlin random sup-measures: simulation, exact limit sampling, closed-form
laws, and statistical verification of the limit theorems at desk scale."""

from . import choquet_oracle, distributions, interval_sets, karlin_sim, limit_sim, verify
from .choquet_oracle import ChoquetQuery, PatternQuery
from .distributions import FrechetLaw, HeavyTailSpec
from .interval_sets import IntervalSet, normalize
from .karlin_sim import FrequencyModel, SimRun, replica_rng, simulate
from .limit_sim import LimitSample, sample_karlin, sample_mstar, sample_on_window
from .verify import SuiteConfig, SuiteReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "ChoquetQuery",
    "PatternQuery",
    "FrechetLaw",
    "HeavyTailSpec",
    "IntervalSet",
    "normalize",
    "FrequencyModel",
    "SimRun",
    "replica_rng",
    "simulate",
    "LimitSample",
    "sample_karlin",
    "sample_mstar",
    "sample_on_window",
    "SuiteConfig",
    "SuiteReport",
    "run_suite",
    "choquet_oracle",
    "distributions",
    "interval_sets",
    "karlin_sim",
    "limit_sim",
    "verify",
    "__version__",
]
