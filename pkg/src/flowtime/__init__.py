"""Semi-Markov process-flow discovery and execution-time analytics.

Pipeline: parse a CSV event log, discover a k-order semi-Markov flow,
then either read off the mean execution time analytically (express
analysis) or eliminate states to obtain the full execution-time PDF as a
Gaussian mixture (full analysis), with what-if editing on top.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .eventlog import EventLog, Trace, Event, parse_event_log, load_event_log, build_traces, log_mean_duration, trace_durations
from .gmm import (
    GaussianMixture,
    DensityCurve,
    FitConfig,
    TruncatedMixture,
    convolve,
    mix,
    coalesce,
    prune,
    self_loop_closure,
    truncate_nonneg,
    fit_kde,
    fit_gmm,
    fit_waiting_time,
)
from .discovery import (
    START,
    END,
    StateKey,
    WaitingTimeModel,
    SemiMarkovFlow,
    discover,
    fit_edge_distributions,
    fit_edges_as_point_masses,
)
from .express import StationaryReport, limiting_probabilities, mean_execution_time, verify_mean_equality
from .reduction import ReductionConfig, TotalTimePDF, eliminate_state, reduce_flow, simulate, WorkingFlow
from .evaluation import BinnedDistribution, bin_log, bin_model, kl_divergence, uniform_baseline, default_edges
from .whatif import Scenario, Edit, apply_scenario

__all__ = [
    "__version__",
    "EventLog", "Trace", "Event", "parse_event_log", "load_event_log",
    "build_traces", "log_mean_duration", "trace_durations",
    "GaussianMixture", "DensityCurve", "FitConfig", "TruncatedMixture",
    "convolve", "mix", "coalesce", "prune", "self_loop_closure",
    "truncate_nonneg", "fit_kde", "fit_gmm", "fit_waiting_time",
    "START", "END", "StateKey", "WaitingTimeModel", "SemiMarkovFlow",
    "discover", "fit_edge_distributions", "fit_edges_as_point_masses",
    "StationaryReport", "limiting_probabilities", "mean_execution_time", "verify_mean_equality",
    "ReductionConfig", "TotalTimePDF", "eliminate_state", "reduce_flow", "simulate", "WorkingFlow",
    "BinnedDistribution", "bin_log", "bin_model", "kl_divergence", "uniform_baseline", "default_edges",
    "Scenario", "Edit", "apply_scenario",
]
