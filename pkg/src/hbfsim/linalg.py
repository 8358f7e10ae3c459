"""Dense complex-matrix numerics shared by all simulator modules.

All operations are pure functions on immutable inputs. Eigenvalues are
sorted in descending order everywhere; inputs that fail the Hermitian
tolerance are rejected rather than silently symmetrized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import (
    DimensionMismatchError,
    IndefiniteMatrixError,
    NonFiniteError,
    NonHermitianError,
    NotPositiveDefiniteError,
)

# Relative tolerance for |A - A^H| against max |A|.
HERMITIAN_RTOL = 1e-10

# Eigenvalues above this (negative) floor are clamped to zero when taking
# matrix square roots; anything below raises IndefiniteMatrixError.
PSD_EIGENVALUE_FLOOR = -1e-10


@dataclass(frozen=True)
class EvdResult:
    """Eigendecomposition with descending real eigenvalues.

    Column ``i`` of ``eigenvectors`` pairs with ``eigenvalues[i]``; the
    eigenvector basis inside a degenerate eigenspace is arbitrary.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square(a) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    return a


def _check_finite(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("matrix contains NaN or Inf entries")


def _check_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> None:
    scale = np.max(np.abs(a)) if a.size else 0.0
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > rtol * scale:
        raise NonHermitianError(
            f"max |A - A^H| = {dev:.3e} exceeds {rtol:.1e} * max |A| = {rtol * scale:.3e}"
        )


def hermitian_evd(a) -> EvdResult:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    a = _as_square(a)
    _check_finite(a)
    _check_hermitian(a)
    w, u = np.linalg.eigh(a)
    return EvdResult(eigenvalues=w[::-1].copy(), eigenvectors=u[:, ::-1].copy())


def principal_sqrt(a) -> np.ndarray:
    """Hermitian principal square root B of a PSD matrix, B @ B^H = A.

    Eigenvalues in [PSD_EIGENVALUE_FLOOR, 0) are clamped to zero; smaller
    ones raise IndefiniteMatrixError.
    """
    evd = hermitian_evd(a)
    w = evd.eigenvalues
    if np.any(w < PSD_EIGENVALUE_FLOOR):
        raise IndefiniteMatrixError(
            f"eigenvalue {w.min():.3e} below floor {PSD_EIGENVALUE_FLOOR:.1e}"
        )
    u = evd.eigenvectors
    b = (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T
    # Output is Hermitian by construction up to roundoff; make it exact.
    return (b + b.conj().T) / 2.0


def logdet_hpd(a) -> float:
    """log2 det(A) of a Hermitian positive definite matrix via Cholesky."""
    a = _as_square(a)
    _check_finite(a)
    _check_hermitian(a)
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("Cholesky factorization failed") from exc
    return float(2.0 * np.sum(np.log2(np.real(np.diag(chol)))))


def solve_hermitian(a, b) -> np.ndarray:
    """Solve A @ X = B for Hermitian positive definite A."""
    a = _as_square(a)
    b = np.asarray(b)
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatchError(
            f"A has {a.shape[0]} rows but B has leading dimension {b.shape[0]}"
        )
    _check_finite(a)
    _check_hermitian(a)
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("Cholesky factorization failed") from exc
    return scipy.linalg.cho_solve(factor, b, check_finite=False)
