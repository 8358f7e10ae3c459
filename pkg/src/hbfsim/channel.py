"""Correlation matrices and seeded Kronecker-model channel realizations.

Entries of the i.i.d. core G follow CN(0, 1/n_r), so the channel carries
the receive-array normalization and the post-combining noise can be taken
as unit variance. Randomness is organized as deterministic substreams
derived from a master seed plus an index, so trial t produces the same
channel no matter how many workers are running or in which order trials
execute. The generator is fixed to numpy's PCG64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, DomainError
from .linalg import principal_sqrt

# Substream namespaces. Trials and per-scheme draws (e.g. random column
# subsets) must never collide.
NS_TRIAL = 0
NS_SCHEME = 1


@dataclass(frozen=True)
class CorrelationProfile:
    """Uniform-linear-array correlation: entry (i, j) is alpha**((i-j)**2)."""

    alpha: float
    n: int

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise DomainError(
                f"alpha must be in [0, 1), got {self.alpha}; "
                "use alpha <= 1 - 1e-12 for near-perfect correlation"
            )
        if self.n < 1:
            raise DomainError(f"array size must be >= 1, got {self.n}")


@dataclass(frozen=True)
class ChannelRealization:
    """One flat-fading channel draw plus the seed path that produced it."""

    h: np.ndarray
    n_r: int
    n_t: int
    seed_path: tuple[int, int] | None = None


def substream(master_seed: int, namespace: int, index: int) -> np.random.Generator:
    """Independent PCG64 stream for (master_seed, namespace, index)."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, namespace, index)))


def trial_stream(master_seed: int, trial_index: int) -> np.random.Generator:
    """The random stream owned by one Monte Carlo trial."""
    return substream(master_seed, NS_TRIAL, trial_index)


def correlation_matrix(profile: CorrelationProfile) -> np.ndarray:
    """n x n symmetric Toeplitz matrix with entry alpha**((i-j)**2).

    The diagonal is exactly 1 (0**0 is taken as 1 at alpha = 0).
    """
    idx = np.arange(profile.n)
    dist2 = (idx[:, None] - idx[None, :]) ** 2
    return np.asarray(profile.alpha, dtype=np.float64) ** dist2


def sample_iid(n_r: int, n_t: int, stream: np.random.Generator) -> np.ndarray:
    """n_r x n_t matrix of i.i.d. CN(0, 1/n_r) entries."""
    if n_r < 1 or n_t < 1:
        raise DomainError(f"dimensions must be >= 1, got ({n_r}, {n_t})")
    scale = np.sqrt(1.0 / (2.0 * n_r))
    re = stream.standard_normal((n_r, n_t))
    im = stream.standard_normal((n_r, n_t))
    return (re + 1j * im) * scale


def kronecker_channel_from_roots(
    root_r: np.ndarray | None,
    root_t: np.ndarray | None,
    g: np.ndarray,
    seed_path: tuple[int, int] | None = None,
) -> ChannelRealization:
    """H = root_r @ G @ root_t^H with precomputed correlation square roots.

    None means an identity correlation on that side; G is then passed
    through untouched. Sweeps reuse the same roots across trials.
    """
    h = np.asarray(g)
    n_r, n_t = h.shape
    if root_r is not None:
        h = root_r @ h
    if root_t is not None:
        h = h @ root_t.conj().T
    return ChannelRealization(h=h, n_r=n_r, n_t=n_t, seed_path=seed_path)


def kronecker_channel(
    r_r: np.ndarray,
    r_t: np.ndarray,
    g: np.ndarray,
    seed_path: tuple[int, int] | None = None,
) -> ChannelRealization:
    """H = sqrt(R_r) @ G @ sqrt(R_t)^H for the separable correlation model.

    Identity correlation matrices are passed through without touching G, so
    the uncorrelated case is bit-identical to its input.
    """
    r_r = np.asarray(r_r)
    r_t = np.asarray(r_t)
    g = np.asarray(g)
    n_r, n_t = g.shape
    if r_r.shape != (n_r, n_r):
        raise DimensionMismatchError(f"r_r shape {r_r.shape} does not match n_r = {n_r}")
    if r_t.shape != (n_t, n_t):
        raise DimensionMismatchError(f"r_t shape {r_t.shape} does not match n_t = {n_t}")
    root_r = None if np.array_equal(r_r, np.eye(n_r)) else principal_sqrt(r_r)
    root_t = None if np.array_equal(r_t, np.eye(n_t)) else principal_sqrt(r_t)
    return kronecker_channel_from_roots(root_r, root_t, g, seed_path=seed_path)
