"""Link-level simulator for hybrid beamforming over correlated MIMO channels."""

__version__ = "0.1.0"

from . import baseband, channel, linalg, metrics, rf_filters  # noqa: F401
from .harness import (  # noqa: F401
    ExperimentConfig,
    SchemeSpec,
    SweepResult,
    emit_csv,
    load_config,
    preset,
    run_experiment,
)
