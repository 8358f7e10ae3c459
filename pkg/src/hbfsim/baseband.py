"""Baseband precoder and postcoder design.

The transmit chain is an RF matrix cascaded with an unconstrained digital
matrix; composed precoding columns are normalized to unit norm so the
per-stream powers of a PowerAllocation directly satisfy the total transmit
power constraint with unit-power symbols.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    DomainError,
    EmptyGainsError,
    NonPositivePowerError,
    SingularEffectiveChannelError,
    StreamCountTooLargeError,
    ZeroColumnError,
)
from .linalg import EvdResult, hermitian_evd
from .rf_filters import RfMatrix

MAX_INVERSION_CONDITION = 1e12


@dataclass(frozen=True)
class HybridBeamformer:
    """RF stage (N x L) cascaded with a digital stage (L x d) for d streams."""

    rf: RfMatrix
    bb: np.ndarray
    d: int

    def __post_init__(self):
        rf_cols = self.rf.mat.shape[1]
        bb_rows, bb_cols = np.asarray(self.bb).shape
        if bb_rows != rf_cols:
            raise DimensionMismatchError(
                f"rf has {rf_cols} chains but bb has {bb_rows} rows"
            )
        if bb_cols != self.d:
            raise DimensionMismatchError(f"bb has {bb_cols} columns, expected d = {self.d}")

    def composed(self) -> np.ndarray:
        return self.rf.mat @ self.bb

    def composed_normalized(self) -> np.ndarray:
        """Composed matrix with each column scaled to unit Euclidean norm."""
        return normalize_columns(self.composed())


@dataclass(frozen=True)
class PowerAllocation:
    """Nonnegative per-stream powers under a total budget (linear units)."""

    powers: np.ndarray
    total: float

    def __post_init__(self):
        p = np.asarray(self.powers, dtype=float)
        if np.any(p < 0):
            raise NonPositivePowerError("stream powers must be nonnegative")
        tol = 1e-10 * max(1.0, abs(self.total))
        if p.sum() > self.total + tol:
            raise NonPositivePowerError(
                f"sum of powers {p.sum():.12g} exceeds budget {self.total:.12g}"
            )
        object.__setattr__(self, "powers", p)


@dataclass(frozen=True)
class TridiagParams:
    """Diagonal value a and off-diagonal value b of an L x L tridiagonal
    Toeplitz matrix."""

    a: float
    b: float
    l: int

    def __post_init__(self):
        if self.l < 1:
            raise DomainError(f"dimension must be >= 1, got {self.l}")


def normalize_columns(m: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=0)
    if np.any(norms == 0):
        raise ZeroColumnError("cannot normalize a zero column")
    return m / norms


def effective_transmit_correlation(r_t, v_rf: RfMatrix | np.ndarray) -> np.ndarray:
    """Correlation seen by the baseband after RF spreading: V^H R V."""
    v = v_rf.mat if isinstance(v_rf, RfMatrix) else np.asarray(v_rf)
    r_t = np.asarray(r_t)
    if r_t.shape[0] != r_t.shape[1] or v.shape[0] != r_t.shape[0]:
        raise DimensionMismatchError(
            f"incompatible shapes r_t {r_t.shape} and v_rf {v.shape}"
        )
    return v.conj().T @ r_t @ v


def tridiag_eigenpairs(p: TridiagParams) -> EvdResult:
    """Closed-form eigenpairs of the L x L tridiagonal Toeplitz matrix.

    Eigenvalue i (1-based) is a + 2b*cos(i*pi/(L+1)) with sine eigenvector
    entries sin(k*i*pi/(L+1)), unit-normalized by sqrt(2/(L+1)). Pairs are
    sorted jointly by descending eigenvalue, which flips the natural index
    order when b < 0.
    """
    i = np.arange(1, p.l + 1)
    lam = p.a + 2.0 * p.b * np.cos(i * np.pi / (p.l + 1))
    k = np.arange(1, p.l + 1)[:, None]
    vecs = np.sin(k * i[None, :] * np.pi / (p.l + 1)) * np.sqrt(2.0 / (p.l + 1))
    order = np.argsort(-lam, kind="stable")
    return EvdResult(eigenvalues=lam[order], eigenvectors=vecs[:, order])


def evd_precoder(r_eff, d: int) -> np.ndarray:
    """Top-d eigenvectors of the effective transmit correlation matrix."""
    r_eff = np.asarray(r_eff)
    if d > r_eff.shape[0]:
        raise StreamCountTooLargeError(
            f"requested {d} streams from an {r_eff.shape[0]}-chain correlation"
        )
    return hermitian_evd(r_eff).eigenvectors[:, :d]


def closed_form_precoder(l: int, d: int) -> np.ndarray:
    """First d sine eigenvectors, needing only the chain count L.

    Valid whenever the effective transmit correlation is (near) tridiagonal
    Toeplitz with positive off-diagonal: column i has entries
    sin(k*i*pi/(L+1)), unit-normalized, and the columns are orthonormal.
    """
    if l < 1:
        raise DomainError(f"chain count must be >= 1, got {l}")
    if d > l:
        raise StreamCountTooLargeError(f"requested {d} streams from {l} chains")
    k = np.arange(1, l + 1)[:, None]
    i = np.arange(1, d + 1)[None, :]
    return np.sin(k * i * np.pi / (l + 1)) * np.sqrt(2.0 / (l + 1))


def waterfilling(gains, p_total: float) -> PowerAllocation:
    """Classic waterfilling: p_i = max(0, mu - 1/g_i) with sum(p) = p_total.

    Solved exactly by the sorted active-set method; ties in gains are broken
    by index order, which is unobservable since equal gains receive equal
    power.
    """
    gains = np.asarray(gains, dtype=float).reshape(-1)
    if gains.size == 0:
        raise EmptyGainsError("need at least one stream gain")
    if p_total <= 0:
        raise NonPositivePowerError(f"total power must be > 0, got {p_total}")
    if np.any(gains <= 0):
        raise DomainError("waterfilling gains must be positive; drop zero-gain streams")
    order = np.argsort(-gains, kind="stable")
    inv = 1.0 / gains[order]
    csum = np.cumsum(inv)
    m = gains.size
    while m > 1:
        mu = (p_total + csum[m - 1]) / m
        if mu > inv[m - 1]:
            break
        m -= 1
    mu = (p_total + csum[m - 1]) / m
    p_sorted = np.zeros_like(inv)
    p_sorted[:m] = mu - inv[:m]
    powers = np.zeros_like(p_sorted)
    powers[order] = p_sorted
    return PowerAllocation(powers=powers, total=p_total)


def channel_inversion_postcoder(h, h_theta: RfMatrix) -> np.ndarray:
    """W^H = (H_theta^H H)^{-1} H_theta^H so that W^H H = I.

    ``h_theta`` is the phase-only RF stage (typically egc_phase_matrix(h));
    the digital stage inverts the effective channel it leaves behind.
    """
    h = np.asarray(h)
    ht = h_theta.mat
    if ht.shape != h.shape:
        raise DimensionMismatchError(
            f"phase matrix shape {ht.shape} does not match channel {h.shape}"
        )
    eff = ht.conj().T @ h
    if np.linalg.cond(eff) >= MAX_INVERSION_CONDITION:
        raise SingularEffectiveChannelError(
            f"effective channel condition number {np.linalg.cond(eff):.3e} too large"
        )
    return np.linalg.solve(eff, ht.conj().T)


def zero_forcing_postcoder(h_eff) -> np.ndarray:
    """Pseudo-inverse postcoder rows: W^H = (H^H H)^{-1} H^H.

    Removes inter-stream interference exactly; rows are left unnormalized so
    the per-stream noise power is the squared row norm.
    """
    h_eff = np.asarray(h_eff)
    gram = h_eff.conj().T @ h_eff
    if np.linalg.cond(gram) >= MAX_INVERSION_CONDITION:
        raise SingularEffectiveChannelError(
            f"stream Gram condition number {np.linalg.cond(gram):.3e} too large"
        )
    return np.linalg.solve(gram, h_eff.conj().T)


def matched_filter_postcoder(h_eff) -> np.ndarray:
    """Matched-filter rows W^H = H^H with each row scaled to unit norm."""
    h_eff = np.asarray(h_eff)
    norms = np.linalg.norm(h_eff, axis=0)
    if np.any(norms == 0):
        raise ZeroColumnError("matched filter undefined for a zero channel column")
    return (h_eff / norms).conj().T
