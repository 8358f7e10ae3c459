"""Experiment configuration and sweep-result models.

These pydantic models are the single schema shared by the YAML config
files, the CLI flags, and the HTTP service request/response bodies.
"""

from __future__ import annotations

from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..exceptions import ConfigInvalidError

TxRfKind = Literal["full", "column_spreader", "dft", "antenna_selection"]
RxRfKind = Literal["full", "row_combiner", "dft"]
PrecoderKind = Literal["csi", "evd", "closed_form", "identity"]
EvaluationKind = Literal["mutual_info", "sinr_zf", "sinr_mf", "closed_form_rate"]
PowerPolicy = Literal["waterfilling", "equal"]


class SchemeSpec(BaseModel):
    """One transceiver scheme: RF filters, baseband design, power policy.

    Precoders: "csi" waterfills the instantaneous effective channel (full
    channel knowledge), "evd" uses the eigenvectors of the effective
    transmit correlation (correlation knowledge only), "closed_form" uses
    the sine eigenvectors that need only the chain count, "identity" sends
    one stream per RF chain.

    Evaluations: "mutual_info" scores the scheme's input covariance by
    log-det rate, "sinr_zf" / "sinr_mf" apply a channel-inverting or
    matched-filter postcoder and sum per-stream SINR rates, and
    "closed_form_rate" is the analytic tridiagonal-eigenvalue rate with no
    channel draw at all.
    """

    model_config = ConfigDict(extra="forbid")

    label: str = Field(min_length=1, pattern=r"^[^,\r\n]+$")  # must stay CSV-safe
    tx_rf: TxRfKind = "full"
    rx_rf: RxRfKind = "full"
    precoder: PrecoderKind = "csi"
    evaluation: EvaluationKind = "mutual_info"
    power: PowerPolicy = "waterfilling"
    k_t: Optional[int] = Field(default=None, ge=1)
    l_t: Optional[int] = Field(default=None, ge=1)
    k_r: Optional[int] = Field(default=None, ge=1)
    l_r: Optional[int] = Field(default=None, ge=1)
    streams: Optional[int] = Field(default=None, ge=1)
    tx_antenna_indices: Optional[list[int]] = None

    @model_validator(mode="after")
    def _check_combos(self):
        if self.precoder == "csi" and self.evaluation != "mutual_info":
            raise ValueError('precoder "csi" requires evaluation "mutual_info"')
        if self.precoder == "identity" and self.evaluation not in ("sinr_mf", "sinr_zf"):
            raise ValueError('precoder "identity" requires a SINR evaluation')
        if self.evaluation == "closed_form_rate" and self.precoder != "closed_form":
            raise ValueError('evaluation "closed_form_rate" requires precoder "closed_form"')
        if self.tx_rf == "antenna_selection" and not self.tx_antenna_indices:
            raise ValueError("antenna_selection needs tx_antenna_indices")
        return self


class ExperimentConfig(BaseModel):
    """Declarative scenario for one seeded Monte Carlo sweep."""

    model_config = ConfigDict(extra="forbid")

    n_r: int = Field(ge=1)
    n_t: int = Field(ge=1)
    alpha_r: float = Field(default=0.0, ge=0.0, lt=1.0)
    alpha_t: float = Field(default=0.0, ge=0.0, lt=1.0)
    epsilon: float = Field(default=0.1, gt=0.0, lt=1.0)
    schemes: list[SchemeSpec] = Field(min_length=1)
    snr_grid_db: list[float] = Field(min_length=1)
    k_t: Optional[int] = Field(default=None, ge=1)
    l_t: Optional[int] = Field(default=None, ge=1)
    k_r: Optional[int] = Field(default=None, ge=1)
    l_r: Optional[int] = Field(default=None, ge=1)
    trials: int = Field(ge=1, lt=2**32)
    master_seed: int = Field(default=0, ge=0, lt=2**64)
    output_path: Optional[str] = None

    @model_validator(mode="after")
    def _check_labels(self):
        labels = [s.label for s in self.schemes]
        if len(set(labels)) != len(labels):
            raise ValueError(f"scheme labels must be unique, got {labels}")
        return self


class SweepRow(BaseModel):
    """Aggregated Monte Carlo rate for one (scheme, SNR) cell."""

    scheme: str
    snr_db: float
    trials: int
    mean_rate_bps_hz: float
    std_err: float
    k: int
    l: int
    seed: int
    dft_columns: Optional[dict[str, list[int]]] = None
    per_trial: Optional[list[float]] = None


class SweepResult(BaseModel):
    """All sweep cells plus the configuration that produced them.

    Every scheme within a trial shares the same channel draw, so rows of
    different schemes are paired sample-by-sample via ``per_trial``.
    """

    rows: list[SweepRow]
    config: ExperimentConfig


def config_from_mapping(data: dict) -> ExperimentConfig:
    """Validate a plain mapping into an ExperimentConfig."""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigInvalidError(str(exc)) from exc


def load_config(path: str) -> ExperimentConfig:
    """Load an experiment config from a YAML file."""
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigInvalidError(f"config file {path} must hold a mapping")
    return config_from_mapping(data)
