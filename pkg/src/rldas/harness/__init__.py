"""Experiment orchestration: training, evaluation, statistics and reports."""
from .config import DESK, FULL, PROFILES, SPLITS, RunConfig, apply_env_overrides
from .evaluate import METHODS, evaluate, per_instance_medians, result_table, run_seed, transfer_eval
from .parallel import ProcessPool, SerialPool, make_pool, ordered_map
from .report import emit_report
from .stats import BETTER, SAME, WORSE, wilcoxon_rank_sum
from .train import TrainResult, instance_sets, latest_checkpoint, rollout, test_set_for, train

__all__ = [
    "BETTER",
    "DESK",
    "METHODS",
    "FULL",
    "PROFILES",
    "SAME",
    "SPLITS",
    "WORSE",
    "ProcessPool",
    "RunConfig",
    "SerialPool",
    "TrainResult",
    "apply_env_overrides",
    "emit_report",
    "evaluate",
    "instance_sets",
    "latest_checkpoint",
    "make_pool",
    "ordered_map",
    "per_instance_medians",
    "result_table",
    "rollout",
    "run_seed",
    "test_set_for",
    "train",
    "transfer_eval",
    "wilcoxon_rank_sum",
]
