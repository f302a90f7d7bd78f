"""Command-line front end: experiment config, sweeps, aggregation and plots."""

from .aggregate import AggregateReport, AggregateRow, aggregate
from .cli import cli_main
from .experiment import ExperimentConfig, apply_override, parse_seeds
from .plot import build_visitation_figure, render_visitation
from .sweep import run_sweep

__all__ = [
    "AggregateReport",
    "AggregateRow",
    "ExperimentConfig",
    "aggregate",
    "apply_override",
    "build_visitation_figure",
    "cli_main",
    "parse_seeds",
    "render_visitation",
    "run_sweep",
]
