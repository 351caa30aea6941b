"""Analytical model and slot-level simulator for prioritized CSMA/CA
medium access in body area networks, with a standard multi-phase scheme
and a modified RTS/CTS scheme sharing one contention framework."""

from .errors import (ConfigError, ConvergenceError, ModelStateError,
                     PhaseTooShortError)
from .experiments import (ExperimentSpec, compare, load_config, parse_config,
                          run_sweep)
from .metrics import (MetricsReport, UpMetrics, access_delay,
                      aggregate_throughput, analytic_metrics,
                      channel_utilization, jain_fairness, reliability,
                      throughput)
from .model import (ChainDistribution, PhaseSolution, Scenario,
                    SolutionReport, SolverOptions, solve,
                    stationary_distribution)
from .protocol import (ChannelParams, EnergyParams, PhyParams, PriorityClass,
                       SchemeConfig, TimingParams, TxDurations,
                       contention_window, derive_stage_limits,
                       lock_probability, mean_backoff, modified_scheme,
                       packet_error_rate, standard_scheme, tx_durations,
                       window_schedule)
from .simulator import SimConfig, SimStats, Simulation, empirical_metrics
from .simulator import run as simulate

__version__ = "0.1.0"

__all__ = [
    "ChainDistribution", "ChannelParams", "ConfigError", "ConvergenceError",
    "EnergyParams", "ExperimentSpec", "MetricsReport", "ModelStateError",
    "PhaseSolution", "PhaseTooShortError", "PhyParams", "PriorityClass",
    "Scenario", "SchemeConfig", "SimConfig", "SimStats", "Simulation",
    "SolutionReport", "SolverOptions", "TimingParams", "TxDurations",
    "UpMetrics", "access_delay", "aggregate_throughput", "analytic_metrics",
    "channel_utilization", "compare", "contention_window",
    "derive_stage_limits", "empirical_metrics", "jain_fairness",
    "load_config", "lock_probability", "mean_backoff", "modified_scheme",
    "packet_error_rate", "parse_config", "reliability", "run_sweep",
    "simulate", "solve", "standard_scheme", "stationary_distribution",
    "throughput", "tx_durations", "window_schedule",
]
