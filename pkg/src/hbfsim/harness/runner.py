"""Seeded Monte Carlo sweep execution.

Each trial owns a substream derived from (master_seed, trial index), all
schemes inside a trial share the same channel draw, and aggregation runs
in trial-index order, so results are bit-identical for a fixed master
seed no matter how many workers execute the trials.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import baseband, channel, linalg, metrics, rf_filters
from ..exceptions import ConfigInvalidError, HbfsimError
from .config import ExperimentConfig, SchemeSpec, SweepResult, SweepRow

log = logging.getLogger("hbfsim")

WORKERS_ENV_VAR = "HBFSIM_WORKERS"

CSV_HEADER = "scheme,snr_db,trials,mean_rate_bps_hz,std_err,k,l,seed"


def adjusted_cluster_size(n: int, alpha: float, epsilon: float) -> int:
    """Heuristic cluster size rounded up to the nearest divisor of n."""
    k_c = rf_filters.cluster_size(alpha, epsilon)
    for d in range(min(k_c, n), n + 1):
        if n % d == 0:
            return d
    return n


@dataclass
class _ResolvedScheme:
    """One scheme with every channel-independent quantity precomputed."""

    label: str
    evaluation: str
    power: str
    d: int
    k_used: int
    l_used: int
    v_rf: np.ndarray | None = None        # n_t x l_t
    w_rfh: np.ndarray | None = None       # l_r x n_r
    v_composed: np.ndarray | None = None  # n_t x d, unit columns
    ccit_gains: np.ndarray | None = None  # fixed per-stream gains, length d
    per_trial_gains: bool = False         # gains measured from the channel draw
    dft_columns: dict[str, list[int]] | None = None

    def rates(self, h: np.ndarray, p_grid: np.ndarray) -> np.ndarray:
        """Rates (bits/s/Hz) of this scheme on channel h at each power."""
        h1 = self.w_rfh @ h if self.w_rfh is not None else h
        if self.evaluation == "closed_form_rate":
            return self._closed_form_rates(p_grid)
        if self.evaluation == "mutual_info":
            return self._mutual_info_rates(h1, p_grid)
        return self._sinr_rates(h1, p_grid)

    def _closed_form_rates(self, p_grid):
        out = np.empty(p_grid.size)
        for qi, p in enumerate(p_grid):
            alloc = _allocate(self.ccit_gains, float(p), self.power)
            out[qi] = metrics.sum_rate_closed_form(self.ccit_gains, alloc).total_bits
        return out

    def _mutual_info_rates(self, h1, p_grid):
        out = np.empty(p_grid.size)
        if self.v_composed is None:
            # full channel knowledge: waterfill the effective channel itself
            h_eff = h1 @ self.v_rf if self.v_rf is not None else h1
            for qi, p in enumerate(p_grid):
                budget = metrics.LinkBudget(p_total=float(p))
                out[qi] = metrics.capacity_waterfilled(h_eff, budget).total_bits
            return out
        # fixed precoding directions: log-det rate of the induced covariance
        hv = h1 @ self.v_composed
        gram = hv.conj().T @ hv
        eye = np.eye(self.d)
        for qi, p in enumerate(p_grid):
            alloc = _allocate(self.ccit_gains, float(p), self.power)
            root = np.sqrt(alloc.powers)
            out[qi] = linalg.logdet_hpd(eye + (root[:, None] * gram) * root[None, :])
        return out

    def _sinr_rates(self, h1, p_grid):
        hv = h1 @ self.v_composed
        if self.evaluation == "sinr_zf":
            w = baseband.zero_forcing_postcoder(hv)
        else:
            w = baseband.matched_filter_postcoder(hv)
        if self.per_trial_gains:
            gains = np.linalg.norm(hv, axis=0) ** 2
        else:
            gains = self.ccit_gains
        out = np.empty(p_grid.size)
        for qi, p in enumerate(p_grid):
            alloc = _allocate(gains, float(p), self.power)
            out[qi] = metrics.sum_rate_sinr(h1, self.v_composed, w, alloc).total_bits
        return out


def _allocate(gains, p_total: float, policy: str) -> baseband.PowerAllocation:
    """Power policy over per-stream gains; nonpositive gains get no power."""
    gains = np.asarray(gains, dtype=float)
    powers = np.zeros(gains.size)
    if policy == "equal":
        powers[:] = p_total / gains.size
        return baseband.PowerAllocation(powers=powers, total=p_total)
    positive = gains > 0
    if positive.any():
        powers[positive] = baseband.waterfilling(gains[positive], p_total).powers
    return baseband.PowerAllocation(powers=powers, total=p_total)


def _resolve_tx(cfg: ExperimentConfig, spec: SchemeSpec, rng) -> tuple:
    """Returns (tx RfMatrix or None, k_t, l_t, dft_cols)."""
    n = cfg.n_t
    if spec.tx_rf == "full":
        return None, 0, n, None
    if spec.tx_rf == "antenna_selection":
        sel = rf_filters.antenna_selection(n, spec.tx_antenna_indices)
        return sel, 0, sel.mat.shape[1], None
    k = spec.k_t or cfg.k_t
    l = spec.l_t or cfg.l_t
    if k is None and l is not None:
        if n % l != 0:
            raise ConfigInvalidError(f"scheme {spec.label!r}: l_t={l} does not divide n_t={n}")
        k = n // l
    if k is None:
        if cfg.alpha_t <= 0:
            raise ConfigInvalidError(
                f"scheme {spec.label!r}: k_t or l_t required when alpha_t = 0"
            )
        k_c = rf_filters.cluster_size(cfg.alpha_t, cfg.epsilon)
        k = adjusted_cluster_size(n, cfg.alpha_t, cfg.epsilon)
        log.info("scheme %s: tx cluster k=%d (heuristic K_c=%d)", spec.label, k, k_c)
    if n % k != 0:
        raise ConfigInvalidError(f"scheme {spec.label!r}: k_t={k} does not divide n_t={n}")
    if l is not None and l * k != n:
        raise ConfigInvalidError(
            f"scheme {spec.label!r}: l_t={l} inconsistent with k_t={k} and n_t={n}"
        )
    l = n // k
    if spec.tx_rf == "column_spreader":
        return rf_filters.column_spreader(n, k), k, l, None
    cols = sorted(int(c) for c in rng.choice(n, size=l, replace=False))
    return rf_filters.dft_projection(n, l, cols), k, l, cols


def _resolve_rx(cfg: ExperimentConfig, spec: SchemeSpec, rng) -> tuple:
    """Returns (w_rfh, k_r, l_r, dft_cols)."""
    n = cfg.n_r
    if spec.rx_rf == "full":
        return None, 0, n, None
    k = spec.k_r or cfg.k_r
    l = spec.l_r or cfg.l_r
    if k is None and l is not None:
        if n % l != 0:
            raise ConfigInvalidError(f"scheme {spec.label!r}: l_r={l} does not divide n_r={n}")
        k = n // l
    if k is None:
        if cfg.alpha_r <= 0:
            raise ConfigInvalidError(
                f"scheme {spec.label!r}: k_r or l_r required when alpha_r = 0"
            )
        k_c = rf_filters.cluster_size(cfg.alpha_r, cfg.epsilon)
        k = adjusted_cluster_size(n, cfg.alpha_r, cfg.epsilon)
        log.info("scheme %s: rx cluster k=%d (heuristic K_c=%d)", spec.label, k, k_c)
    if n % k != 0:
        raise ConfigInvalidError(f"scheme {spec.label!r}: k_r={k} does not divide n_r={n}")
    if l is not None and l * k != n:
        raise ConfigInvalidError(
            f"scheme {spec.label!r}: l_r={l} inconsistent with k_r={k} and n_r={n}"
        )
    l = n // k
    if spec.rx_rf == "row_combiner":
        return rf_filters.row_combiner(n, k).mat, k, l, None
    cols = sorted(int(c) for c in rng.choice(n, size=l, replace=False))
    return rf_filters.dft_projection(n, l, cols).mat.conj().T, k, l, cols


def resolve_schemes(cfg: ExperimentConfig) -> list[_ResolvedScheme]:
    """Precompute RF filters, baseband precoders, and fixed gains.

    All validation that can fail does so here, before any trial runs.
    """
    r_t = channel.correlation_matrix(channel.CorrelationProfile(cfg.alpha_t, cfg.n_t))
    resolved = []
    for idx, spec in enumerate(cfg.schemes):
        try:
            resolved.append(_resolve_one(cfg, spec, idx, r_t))
        except ConfigInvalidError:
            raise
        except HbfsimError as exc:
            raise ConfigInvalidError(f"scheme {spec.label!r}: {exc}") from exc
    return resolved


def _resolve_one(cfg, spec, idx, r_t) -> _ResolvedScheme:
    rng = channel.substream(cfg.master_seed, channel.NS_SCHEME, idx)
    tx_rf, k_t, l_t, tx_cols = _resolve_tx(cfg, spec, rng)
    w_rfh, k_r, l_r, rx_cols = _resolve_rx(cfg, spec, rng)
    dft_cols = {}
    if tx_cols is not None:
        dft_cols["tx"] = tx_cols
    if rx_cols is not None:
        dft_cols["rx"] = rx_cols

    d = spec.streams or l_t
    if d > l_t:
        raise ConfigInvalidError(f"scheme {spec.label!r}: streams={d} exceeds l_t={l_t}")
    if spec.evaluation in ("sinr_zf", "sinr_mf") and d > l_r:
        raise ConfigInvalidError(
            f"scheme {spec.label!r}: streams={d} exceeds receive dimension {l_r}"
        )

    scheme = _ResolvedScheme(
        label=spec.label,
        evaluation=spec.evaluation,
        power=spec.power,
        d=d,
        k_used=k_t if k_t else k_r,
        l_used=l_t,
        v_rf=None if tx_rf is None else tx_rf.mat,
        w_rfh=w_rfh,
        dft_columns=dft_cols or None,
    )
    _attach_baseband(scheme, spec, r_t, tx_rf, l_t, d)
    if tx_rf is not None:
        log.info(
            "scheme %s: tx RF %s, %d phase shifters",
            spec.label, tx_rf.kind.value, tx_rf.phase_shifter_count,
        )
    return scheme


def _attach_baseband(scheme, spec, r_t, tx_rf, l_t, d):
    if spec.precoder == "csi":
        return
    r_eff = (
        baseband.effective_transmit_correlation(r_t, tx_rf) if tx_rf is not None else r_t
    )
    if spec.precoder == "evd":
        evd = linalg.hermitian_evd(r_eff)
        v_bb = evd.eigenvectors[:, :d]
        scheme.ccit_gains = np.clip(evd.eigenvalues[:d], 0.0, None)
    elif spec.precoder == "closed_form":
        a = float(np.real(r_eff[0, 0]))
        b = float(np.real(r_eff[0, 1])) if l_t > 1 else 0.0
        pairs = baseband.tridiag_eigenpairs(baseband.TridiagParams(a=a, b=b, l=l_t))
        v_bb = pairs.eigenvectors[:, :d]
        scheme.ccit_gains = np.clip(pairs.eigenvalues[:d], 0.0, None)
        log.info(
            "scheme %s: tridiagonal a=%.6g b=%.6g eigenvalues %s",
            spec.label, a, b, np.array2string(pairs.eigenvalues, precision=4),
        )
    else:  # identity
        v_bb = np.eye(l_t)[:, :d]
        scheme.per_trial_gains = True
    if tx_rf is not None:
        hb = baseband.HybridBeamformer(rf=tx_rf, bb=v_bb, d=d)
        scheme.v_composed = hb.composed_normalized()
    else:
        scheme.v_composed = baseband.normalize_columns(v_bb)


def _trial_rates(ctx: "_RunContext", trial: int) -> np.ndarray:
    rng = channel.trial_stream(ctx.master_seed, trial)
    g = channel.sample_iid(ctx.n_r, ctx.n_t, rng)
    realization = channel.kronecker_channel_from_roots(
        ctx.root_r, ctx.root_t, g, seed_path=(ctx.master_seed, trial)
    )
    out = np.empty((len(ctx.schemes), ctx.p_grid.size))
    for si, scheme in enumerate(ctx.schemes):
        out[si] = scheme.rates(realization.h, ctx.p_grid)
    return out


@dataclass
class _RunContext:
    master_seed: int
    n_r: int
    n_t: int
    root_r: np.ndarray | None
    root_t: np.ndarray | None
    p_grid: np.ndarray
    schemes: list[_ResolvedScheme] = field(default_factory=list)


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV_VAR, "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def run_experiment(
    cfg: ExperimentConfig,
    workers: int | None = None,
    keep_per_trial: bool = False,
) -> SweepResult:
    """Run the full seeded sweep described by the configuration.

    Output is bit-identical for a fixed master seed regardless of the
    worker count; per-trial rates are retained when keep_per_trial is set.
    """
    schemes = resolve_schemes(cfg)
    root_r = root_t = None
    if cfg.alpha_r > 0:
        r_r = channel.correlation_matrix(channel.CorrelationProfile(cfg.alpha_r, cfg.n_r))
        root_r = linalg.principal_sqrt(r_r)
    if cfg.alpha_t > 0:
        r_t = channel.correlation_matrix(channel.CorrelationProfile(cfg.alpha_t, cfg.n_t))
        root_t = linalg.principal_sqrt(r_t)
    ctx = _RunContext(
        master_seed=cfg.master_seed,
        n_r=cfg.n_r,
        n_t=cfg.n_t,
        root_r=root_r,
        root_t=root_t,
        p_grid=np.asarray([10.0 ** (s / 10.0) for s in cfg.snr_grid_db]),
        schemes=schemes,
    )
    n_workers = workers if workers is not None else default_workers()
    if n_workers <= 1:
        per_trial = [_trial_rates(ctx, t) for t in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            per_trial = list(pool.map(lambda t: _trial_rates(ctx, t), range(cfg.trials)))
    stacked = np.stack(per_trial)  # (trials, schemes, snrs)
    mean = stacked.mean(axis=0)
    if cfg.trials > 1:
        std_err = stacked.std(axis=0, ddof=1) / math.sqrt(cfg.trials)
    else:
        std_err = np.zeros_like(mean)

    rows = []
    for si, scheme in enumerate(schemes):
        for qi, snr_db in enumerate(cfg.snr_grid_db):
            rows.append(
                SweepRow(
                    scheme=scheme.label,
                    snr_db=float(snr_db),
                    trials=cfg.trials,
                    mean_rate_bps_hz=float(mean[si, qi]),
                    std_err=float(std_err[si, qi]),
                    k=scheme.k_used,
                    l=scheme.l_used,
                    seed=cfg.master_seed,
                    dft_columns=scheme.dft_columns,
                    per_trial=(
                        [float(x) for x in stacked[:, si, qi]] if keep_per_trial else None
                    ),
                )
            )
    return SweepResult(rows=rows, config=cfg)


def _fmt(value: float) -> str:
    # repr of a Python float is the shortest string that round-trips exactly
    return repr(float(value))


def to_csv(result: SweepResult) -> str:
    lines = [CSV_HEADER]
    for r in result.rows:
        lines.append(
            f"{r.scheme},{_fmt(r.snr_db)},{r.trials},{_fmt(r.mean_rate_bps_hz)},"
            f"{_fmt(r.std_err)},{r.k},{r.l},{r.seed}"
        )
    return "\n".join(lines) + "\n"


def emit_csv(result: SweepResult, path: str) -> None:
    """Write one header row plus one row per (scheme, snr) cell."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(to_csv(result))
