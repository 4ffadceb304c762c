"""Reproducible random positive definite matrices and scalar grids.

All randomness comes from ``numpy``'s PCG64 bit generator seeded through
``SeedSequence``, which is specified independently of platform.  Generators
are pure functions of their :class:`SampleConfig`.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from .hermit import HermitianMatrix, hermitize


@dataclass(frozen=True)
class SampleConfig:
    dim: int
    seed: int = 0
    cond_cap: float = 1e8
    eigenvalue_range: Tuple[float, float] = (0.1, 10.0)

    def __post_init__(self):
        lo, hi = self.eigenvalue_range
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        if not 0 < lo <= hi:
            raise ValueError(f"eigenvalue_range needs 0 < lo <= hi, got {self.eigenvalue_range!r}")
        if not self.cond_cap >= 1:
            raise ValueError(f"cond_cap must be >= 1, got {self.cond_cap!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")

    def with_seed(self, seed: int) -> "SampleConfig":
        return replace(self, seed=int(seed))


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for trial ``index``, a hash of ``(master_seed, index)``."""
    state = np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1, np.uint64)
    return int(state[0])


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar unitary from the QR factorization of a complex Gaussian matrix."""
    Z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def _spectrum(rng, dim, lo, hi):
    return rng.uniform(lo, hi, size=dim)


def _hpd(rng, cfg: SampleConfig, lo=None):
    lo_cfg, hi = cfg.eigenvalue_range
    lo = lo_cfg if lo is None else lo
    hi = min(hi, lo_cfg * cfg.cond_cap)
    Q = random_unitary(rng, cfg.dim)
    lam = _spectrum(rng, cfg.dim, lo, hi)
    return hermitize((Q * lam) @ Q.conj().T)


def random_hpd(cfg: SampleConfig) -> HermitianMatrix:
    """``Q diag(lambda) Q^*`` with ``lambda ~ U(eigenvalue_range)`` and Haar ``Q``.

    The upper end of the range is clipped to ``lo * cond_cap``.
    """
    return _hpd(rng_for(cfg.seed), cfg)


def random_psd(rng: np.random.Generator, cfg: SampleConfig) -> HermitianMatrix:
    """Positive semidefinite matrix with eigenvalues drawn from ``[0, hi]``."""
    return _hpd(rng, cfg, lo=0.0)


def random_ordered_pair(cfg: SampleConfig) -> Tuple[HermitianMatrix, HermitianMatrix]:
    """Pair with ``0 < A <= B``: ``B = A + P`` for a random PSD ``P``."""
    rng = rng_for(cfg.seed)
    A = _hpd(rng, cfg)
    P = random_psd(rng, cfg)
    return A, A + P


def random_independent_pair(cfg: SampleConfig) -> Tuple[HermitianMatrix, HermitianMatrix]:
    """Two independent draws of :func:`random_hpd` from one stream."""
    rng = rng_for(cfg.seed)
    return _hpd(rng, cfg), _hpd(rng, cfg)


def commuting_spectra(cfg: SampleConfig):
    """Shared Haar basis ``Q`` and eigenvalue vectors ``a``, ``b``.

    These are exactly the ingredients of :func:`random_commuting_pair` for
    the same config.
    """
    rng = rng_for(cfg.seed)
    lo, hi = cfg.eigenvalue_range
    hi = min(hi, lo * cfg.cond_cap)
    Q = random_unitary(rng, cfg.dim)
    a = _spectrum(rng, cfg.dim, lo, hi)
    b = _spectrum(rng, cfg.dim, lo, hi)
    return Q, a, b


def random_commuting_pair(cfg: SampleConfig) -> Tuple[HermitianMatrix, HermitianMatrix]:
    """``A = Q diag(a) Q^*`` and ``B = Q diag(b) Q^*`` with one random ``Q``."""
    Q, a, b = commuting_spectra(cfg)
    return hermitize((Q * a) @ Q.conj().T), hermitize((Q * b) @ Q.conj().T)


def log_grid(t_lo: float, t_hi: float, n: int) -> np.ndarray:
    """``n`` geometrically spaced points with exact endpoints."""
    if not (0 < t_lo < t_hi) or not np.isfinite(t_hi):
        raise ValueError(f"log_grid needs 0 < t_lo < t_hi, got ({t_lo!r}, {t_hi!r})")
    if int(n) != n or n < 2:
        raise ValueError(f"log_grid needs n >= 2, got {n!r}")
    g = np.geomspace(t_lo, t_hi, int(n))
    g[0], g[-1] = t_lo, t_hi
    return g
