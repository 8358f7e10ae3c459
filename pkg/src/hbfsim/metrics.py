"""Rate and SNR evaluation.

Rates are bits/s/Hz with log base 2 throughout. Noise is unit-variance
complex Gaussian per receive branch before RF combining; "SNR" therefore
means the total transmit power P in linear units (dB on harness axes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baseband import PowerAllocation, waterfilling
from .exceptions import DimensionMismatchError, DomainError, LengthMismatchError
from .linalg import principal_sqrt, solve_hermitian

# Singular values below sqrt(RANK_RTOL) * max are treated as zero modes.
RANK_RTOL = 1e-24


@dataclass(frozen=True)
class LinkBudget:
    """Total transmit power and post-RF noise covariance (None = identity)."""

    p_total: float
    noise_cov: np.ndarray | None = None

    def __post_init__(self):
        if self.p_total <= 0:
            raise DomainError(f"p_total must be > 0, got {self.p_total}")


@dataclass(frozen=True)
class RateResult:
    """Total rate plus the per-stream decomposition that sums to it."""

    total_bits: float
    per_stream: np.ndarray
    scheme_label: str = ""


def _rate_from(per_stream: np.ndarray, label: str) -> RateResult:
    per_stream = np.asarray(per_stream, dtype=float)
    return RateResult(
        total_bits=float(per_stream.sum()), per_stream=per_stream, scheme_label=label
    )


def capacity_waterfilled(h_eff, budget: LinkBudget, label: str = "") -> RateResult:
    """Waterfilled capacity of the effective channel under the budget.

    The channel is noise-whitened, power is waterfilled over the squared
    singular values, and the rate is sum(log2(1 + s_i^2 p_i)). Equals the
    log-determinant rate of the induced input covariance.
    """
    h_eff = np.asarray(h_eff)
    if h_eff.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got shape {h_eff.shape}")
    if budget.noise_cov is not None:
        root = principal_sqrt(budget.noise_cov)
        h_eff = solve_hermitian(root, h_eff)
    s = np.linalg.svd(h_eff, compute_uv=False)
    gains = s**2
    if gains.size == 0 or gains.max() <= 0:
        return _rate_from(np.zeros(0), label)
    kept = gains > gains.max() * RANK_RTOL
    per_stream = np.zeros(gains.size)
    alloc = waterfilling(gains[kept], budget.p_total)
    per_stream[kept] = np.log2(1.0 + gains[kept] * alloc.powers)
    return _rate_from(per_stream, label)


def sum_rate_sinr(
    h,
    v,
    w,
    alloc: PowerAllocation,
    noise_cov: np.ndarray | None = None,
    label: str = "",
) -> RateResult:
    """Per-stream SINR rate for a fixed linear precoder and postcoder.

    ``v`` holds composed precoding columns (one per stream) and ``w`` holds
    postcoder rows w_i^H. Stream i sees signal p_i |w_i^H H v_i|^2 against
    the other streams' leakage plus the filtered noise w_i^H N w_i.
    """
    h = np.asarray(h)
    v = np.asarray(v)
    w = np.asarray(w)
    d = v.shape[1]
    if w.shape[0] != d or alloc.powers.size != d:
        raise DimensionMismatchError(
            f"{d} precoder columns need {d} postcoder rows and powers, "
            f"got {w.shape[0]} and {alloc.powers.size}"
        )
    if h.shape != (w.shape[1], v.shape[0]):
        raise DimensionMismatchError(
            f"channel shape {h.shape} incompatible with v {v.shape}, w {w.shape}"
        )
    s = w @ h @ v
    p = alloc.powers
    cross_power = np.abs(s) ** 2
    signal = p * np.diag(cross_power)
    interference = cross_power @ p - signal
    if noise_cov is None:
        noise = np.linalg.norm(w, axis=1) ** 2
    else:
        noise = np.real(np.einsum("ij,jk,ik->i", w, noise_cov, w.conj()))
    sinr = signal / (interference + noise)
    return _rate_from(np.log2(1.0 + sinr), label)


def sum_rate_closed_form(eigvals, alloc: PowerAllocation, label: str = "") -> RateResult:
    """sum(log2(1 + lambda_i p_i)) over the per-stream eigenvalue gains."""
    eigvals = np.asarray(eigvals, dtype=float).reshape(-1)
    if eigvals.size != alloc.powers.size:
        raise LengthMismatchError(
            f"{eigvals.size} eigenvalues but {alloc.powers.size} stream powers"
        )
    if np.any(eigvals < 0):
        raise DomainError("eigenvalue gains must be nonnegative")
    return _rate_from(np.log2(1.0 + eigvals * alloc.powers), label)


def egc_snr_estimate(trials: int, n_r: int, stream: np.random.Generator) -> float:
    """Monte Carlo estimate of the per-stream phase-combining SNR gain.

    Averages |h| over CN(0, 1/n_r) samples and returns n_r * mean^2, which
    converges to pi/4 regardless of n_r.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    scale = np.sqrt(1.0 / (2.0 * n_r))
    h = (stream.standard_normal(trials) + 1j * stream.standard_normal(trials)) * scale
    return float(n_r * np.abs(h).mean() ** 2)


def egc_cross_term_power(trials: int, n_r: int, stream: np.random.Generator) -> float:
    """Mean leakage power of a unit-norm phase combiner into an independent
    stream.

    Each trial draws two independent CN(0, 1/n_r) columns, phase-matches the
    combiner to the first, and measures |w^H h_other|^2. Decays as 1/n_r,
    which is the interference suppression the phase combiner buys at scale.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    scale = np.sqrt(1.0 / (2.0 * n_r))
    h_own = (
        stream.standard_normal((trials, n_r)) + 1j * stream.standard_normal((trials, n_r))
    ) * scale
    h_other = (
        stream.standard_normal((trials, n_r)) + 1j * stream.standard_normal((trials, n_r))
    ) * scale
    w = np.exp(1j * np.angle(h_own)) / np.sqrt(n_r)
    cross = np.abs(np.sum(w.conj() * h_other, axis=1)) ** 2
    return float(cross.mean())
