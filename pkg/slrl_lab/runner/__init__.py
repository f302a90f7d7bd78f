"""Two-phase protocol: source pretraining, then one life in the target MDP."""

from .prior import PRIOR_SOURCES, PretrainConfig, PriorBundle, build_prior
from .records import (
    RunRecord,
    TraceRow,
    TraceTable,
    list_run_records,
    load_run_record,
    read_trace,
    run_paths,
    save_run_record,
    write_trace,
)
from .single_life import METHOD_SHAPING, METHODS, MethodConfig, SingleLife, reward_relabel, run_single_life

__all__ = [
    "METHODS",
    "METHOD_SHAPING",
    "MethodConfig",
    "PRIOR_SOURCES",
    "PretrainConfig",
    "PriorBundle",
    "RunRecord",
    "SingleLife",
    "TraceRow",
    "TraceTable",
    "build_prior",
    "list_run_records",
    "load_run_record",
    "read_trace",
    "reward_relabel",
    "run_paths",
    "run_single_life",
    "save_run_record",
    "write_trace",
]
