"""Preset sweep scenarios.

Each preset mirrors one of the headline comparisons at a configurable
scale: scale 1.0 reproduces the reference array dimensions, while the
default 0.25 runs the same comparison at desk scale in minutes. Dimensions
are rounded so every cluster size stays a divisor of its array size.
Correlation values are documented defaults, not published ones.
"""

from __future__ import annotations

from ..exceptions import DomainError, UnknownPresetError
from .config import ExperimentConfig, SchemeSpec

PRESET_NAMES = ("fig3", "fig4", "fig5", "fig6")

DEFAULT_SCALE = 0.25
DEFAULT_TRIALS = 500
DEFAULT_SEED = 20260809


def _scaled(n: int, scale: float, multiple: int = 1) -> int:
    """Scale n and round to the nearest positive multiple."""
    return max(multiple, round(n * scale / multiple) * multiple)


def _fig3(scale: float) -> ExperimentConfig:
    # large uncorrelated receive array; correlated transmitter spreads over
    # clusters of 3 and the baseband knows either the channel (csi), just
    # the correlation (closed_form), or nothing (identity + matched filter)
    k = 3
    return ExperimentConfig(
        n_r=_scaled(256, scale),
        n_t=_scaled(60, scale, multiple=k),
        alpha_r=0.0,
        alpha_t=0.8,
        snr_grid_db=[0.0, 5.0, 10.0, 15.0, 20.0],
        trials=DEFAULT_TRIALS,
        master_seed=DEFAULT_SEED,
        schemes=[
            SchemeSpec(
                label="csit-evd",
                tx_rf="column_spreader",
                precoder="csi",
                evaluation="mutual_info",
                k_t=k,
            ),
            SchemeSpec(
                label="ccit-closed-form",
                tx_rf="column_spreader",
                precoder="closed_form",
                evaluation="sinr_zf",
                k_t=k,
            ),
            SchemeSpec(
                label="mf-interference-free",
                tx_rf="column_spreader",
                precoder="identity",
                evaluation="sinr_mf",
                k_t=k,
            ),
        ],
    )


def _fig4(scale: float) -> ExperimentConfig:
    # closed-form tridiagonal rate against simulated EVD precoding while the
    # cluster size sweeps; fixed 20 dB transmit power
    ks = (2, 4, 8, 16)
    schemes = []
    for k in ks:
        schemes.append(
            SchemeSpec(
                label=f"cs-closed-form-k{k}",
                tx_rf="column_spreader",
                precoder="closed_form",
                evaluation="closed_form_rate",
                k_t=k,
            )
        )
        schemes.append(
            SchemeSpec(
                label=f"cs-evd-mc-k{k}",
                tx_rf="column_spreader",
                precoder="evd",
                evaluation="sinr_mf",
                k_t=k,
            )
        )
    return ExperimentConfig(
        n_r=_scaled(512, scale),
        n_t=_scaled(32, scale, multiple=max(ks)),
        alpha_r=0.0,
        alpha_t=0.9,
        snr_grid_db=[20.0],
        trials=DEFAULT_TRIALS,
        master_seed=DEFAULT_SEED,
        schemes=schemes,
    )


def _fig5(scale: float) -> ExperimentConfig:
    # highly correlated transmitter: block spreading against random DFT
    # columns at matched chain counts
    ks = (8, 4, 2)  # chain fractions 1/8, 1/4, 1/2 of the transmit array
    n_t = _scaled(128, scale, multiple=max(ks))
    schemes = []
    for k in ks:
        l = n_t // k
        schemes.append(
            SchemeSpec(
                label=f"cs-l{l}",
                tx_rf="column_spreader",
                precoder="csi",
                evaluation="mutual_info",
                k_t=k,
            )
        )
        schemes.append(
            SchemeSpec(
                label=f"dft-l{l}",
                tx_rf="dft",
                precoder="csi",
                evaluation="mutual_info",
                l_t=l,
            )
        )
    return ExperimentConfig(
        n_r=_scaled(256, scale),
        n_t=n_t,
        alpha_r=0.0,
        alpha_t=0.9,
        snr_grid_db=[0.0, 5.0, 10.0, 15.0, 20.0],
        trials=DEFAULT_TRIALS,
        master_seed=DEFAULT_SEED,
        schemes=schemes,
    )


def _fig6(scale: float) -> ExperimentConfig:
    # both sides correlated and chain-limited with matched L on each side;
    # the receive filter mirrors the transmit one
    ks = (4, 2)
    n = _scaled(128, scale, multiple=max(ks))
    schemes = []
    for k in ks:
        l = n // k
        schemes.append(
            SchemeSpec(
                label=f"cs-l{l}",
                tx_rf="column_spreader",
                rx_rf="row_combiner",
                precoder="csi",
                evaluation="mutual_info",
                k_t=k,
                k_r=k,
            )
        )
        schemes.append(
            SchemeSpec(
                label=f"dft-l{l}",
                tx_rf="dft",
                rx_rf="dft",
                precoder="csi",
                evaluation="mutual_info",
                l_t=l,
                l_r=l,
            )
        )
    return ExperimentConfig(
        n_r=n,
        n_t=n,
        alpha_r=0.7,
        alpha_t=0.7,
        snr_grid_db=[0.0, 5.0, 10.0, 15.0, 20.0],
        trials=DEFAULT_TRIALS,
        master_seed=DEFAULT_SEED,
        schemes=schemes,
    )


_BUILDERS = {"fig3": _fig3, "fig4": _fig4, "fig5": _fig5, "fig6": _fig6}


def preset(name: str, scale: float = DEFAULT_SCALE) -> ExperimentConfig:
    """Named preset scenario scaled on its array dimensions."""
    if name not in _BUILDERS:
        raise UnknownPresetError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    if not 0.0 < scale <= 1.0:
        raise DomainError(f"scale must be in (0, 1], got {scale}")
    return _BUILDERS[name](scale)
