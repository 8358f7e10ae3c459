"""Experiment runner: declarative configs, seeded sweeps, CSV emission."""

from .config import (
    ExperimentConfig,
    SchemeSpec,
    SweepResult,
    SweepRow,
    config_from_mapping,
    load_config,
)
from .presets import DEFAULT_SCALE, PRESET_NAMES, preset
from .runner import (
    CSV_HEADER,
    WORKERS_ENV_VAR,
    adjusted_cluster_size,
    default_workers,
    emit_csv,
    resolve_schemes,
    run_experiment,
    to_csv,
)

__all__ = [
    "CSV_HEADER",
    "DEFAULT_SCALE",
    "ExperimentConfig",
    "PRESET_NAMES",
    "SchemeSpec",
    "SweepResult",
    "SweepRow",
    "WORKERS_ENV_VAR",
    "adjusted_cluster_size",
    "config_from_mapping",
    "default_workers",
    "emit_csv",
    "load_config",
    "preset",
    "resolve_schemes",
    "run_experiment",
    "to_csv",
]
