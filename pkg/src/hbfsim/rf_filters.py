"""RF-stage matrix constructors.

Every RF matrix obeys the analog hardware constraint: each entry is either
exactly zero or has the one fixed magnitude shared by all nonzero entries
of that matrix. ``phase_shifter_count`` records the hardware cost as the
number of nonzero entries, except for pure antenna selection which needs
switches only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .exceptions import (
    DomainError,
    DuplicateIndexError,
    EmptyInputError,
    IndexOutOfRangeError,
    NotDivisibleError,
)


class RfKind(str, Enum):
    ROW_COMBINER = "row_combiner"
    COLUMN_SPREADER = "column_spreader"
    DFT_PROJECTION = "dft_projection"
    ANTENNA_SELECTION = "antenna_selection"
    EGC_PHASE = "egc_phase"
    PHASE_ALIGNED = "phase_aligned"


@dataclass(frozen=True)
class RfMatrix:
    mat: np.ndarray
    kind: RfKind
    phase_shifter_count: int


def cluster_size(alpha: float, epsilon: float) -> int:
    """Cluster width from the correlation decay rule, clamped to >= 1.

    Computes 2 * floor(sqrt(log(epsilon) / log(alpha))): the widest block
    whose center-to-adjacent-edge correlation alpha**((K/2 + 1)**2) still
    falls below epsilon.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must be in (0, 1), got {epsilon}")
    k = 2 * math.floor(math.sqrt(math.log(epsilon) / math.log(alpha)))
    return max(1, k)


def row_combiner(n: int, k: int) -> RfMatrix:
    """(n/k) x n block combiner: row l sums antennas [l*k, (l+1)*k) / sqrt(k)."""
    if n < 1 or k < 1:
        raise DomainError(f"n and k must be >= 1, got ({n}, {k})")
    if n % k != 0:
        raise NotDivisibleError(f"cluster size {k} does not divide array size {n}")
    l = n // k
    mat = np.zeros((l, n))
    val = 1.0 / math.sqrt(k)
    for row in range(l):
        mat[row, row * k : (row + 1) * k] = val
    return RfMatrix(mat=mat, kind=RfKind.ROW_COMBINER, phase_shifter_count=n)


def column_spreader(n: int, k: int) -> RfMatrix:
    """n x (n/k) spreader repeating each stream over a block of k antennas.

    Equals the row combiner conjugate-transposed; columns are orthonormal.
    """
    rc = row_combiner(n, k)
    return RfMatrix(
        mat=rc.mat.conj().T,
        kind=RfKind.COLUMN_SPREADER,
        phase_shifter_count=rc.phase_shifter_count,
    )


def _check_indices(n: int, indices: Sequence[int]) -> list[int]:
    idx = [int(i) for i in indices]
    for i in idx:
        if not 0 <= i < n:
            raise IndexOutOfRangeError(f"index {i} outside [0, {n})")
    if len(set(idx)) != len(idx):
        raise DuplicateIndexError(f"indices {idx} contain duplicates")
    return idx


def dft_projection(n: int, l: int, column_indices: Sequence[int]) -> RfMatrix:
    """n x l slice of the n-point DFT matrix, scaled to orthonormal columns.

    Entry (m, c) is exp(-2j*pi*m*column_indices[c]/n) / sqrt(n).
    """
    if l < 1 or l > n:
        raise DomainError(f"need 1 <= l <= n, got l = {l}, n = {n}")
    idx = _check_indices(n, column_indices)
    if len(idx) != l:
        raise DomainError(f"expected {l} column indices, got {len(idx)}")
    m = np.arange(n)[:, None]
    cols = np.asarray(idx)[None, :]
    mat = np.exp(-2j * np.pi * m * cols / n) / np.sqrt(n)
    return RfMatrix(mat=mat, kind=RfKind.DFT_PROJECTION, phase_shifter_count=n * l)


def antenna_selection(n: int, indices: Sequence[int]) -> RfMatrix:
    """n x len(indices) selection matrix; column c is basis vector e_indices[c].

    Selection is implemented with switches, so the phase-shifter cost is 0.
    """
    idx = _check_indices(n, indices)
    mat = np.zeros((n, len(idx)))
    for c, i in enumerate(idx):
        mat[i, c] = 1.0
    return RfMatrix(mat=mat, kind=RfKind.ANTENNA_SELECTION, phase_shifter_count=0)


def egc_phase_matrix(h) -> RfMatrix:
    """Unit-modulus matrix carrying only the phases of the channel entries.

    Exact zeros map to 1 (phase 0) so the output stays deterministic; a zero
    channel entry is a measure-zero event under continuous fading.
    """
    h = np.asarray(h, dtype=complex)
    mag = np.abs(h)
    mat = np.ones_like(h)
    np.divide(h, mag, out=mat, where=mag > 0)
    return RfMatrix(mat=mat, kind=RfKind.EGC_PHASE, phase_shifter_count=h.size)


def _wrap_phase(phi: float) -> float:
    # store phases in (-pi, pi]
    if phi <= -np.pi:
        return np.pi
    return phi


def phase_align_cluster(vectors: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Greedily phase-rotate vectors so their running sum has maximal norm.

    The first vector is the reference (phase 0); each next vector v gets the
    phase of v^H u against the running sum u, which maximizes
    ||u + v*exp(1j*phase)||^2 over the phase. Returns (phases, combined sum).
    """
    if len(vectors) == 0:
        raise EmptyInputError("need at least one vector")
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    length = vecs[0].size
    for v in vecs[1:]:
        if v.size != length:
            raise EmptyInputError("vectors must share one length")
    phases = np.zeros(len(vecs))
    combined = vecs[0].copy()
    for k, v in enumerate(vecs[1:], start=1):
        phi = _wrap_phase(float(np.angle(np.vdot(v, combined))))
        phases[k] = phi
        combined = combined + v * np.exp(1j * phi)
    return phases, combined


def phase_aligned_combiner(h, k: int) -> RfMatrix:
    """Row combiner whose cluster entries are phase-rotated before summing.

    Rows of ``h`` inside each cluster of size ``k`` are aligned with
    phase_align_cluster, so cluster sums add near-constructively instead of
    blindly. Same block support and 1/sqrt(k) magnitude as row_combiner.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    if n % k != 0:
        raise NotDivisibleError(f"cluster size {k} does not divide array size {n}")
    l = n // k
    mat = np.zeros((l, n), dtype=complex)
    val = 1.0 / math.sqrt(k)
    for row in range(l):
        sl = slice(row * k, (row + 1) * k)
        phases, _ = phase_align_cluster(list(h[sl, :]))
        mat[row, sl] = val * np.exp(1j * phases)
    return RfMatrix(mat=mat, kind=RfKind.PHASE_ALIGNED, phase_shifter_count=n)
