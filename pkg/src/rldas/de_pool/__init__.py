"""Candidate DE optimizers sharing one population and a context memory."""
from .context import (
    N_ALGORITHMS,
    N_MAX,
    N_MIN,
    AlgorithmId,
    ContextMemory,
    DeRunState,
    archive_capacity,
    init_context,
    restore,
    save_context,
)
from .population import PopulationState, evaluate_trials, init_population, resize_population
from .runner import BACKBONES, TERM_ERROR, IntervalResult, backbone, run_backbone, step_interval, trace_csv

__all__ = [
    "N_ALGORITHMS",
    "N_MAX",
    "N_MIN",
    "AlgorithmId",
    "BACKBONES",
    "ContextMemory",
    "DeRunState",
    "IntervalResult",
    "PopulationState",
    "TERM_ERROR",
    "archive_capacity",
    "backbone",
    "evaluate_trials",
    "init_context",
    "init_population",
    "resize_population",
    "restore",
    "run_backbone",
    "save_context",
    "step_interval",
    "trace_csv",
]
