"""Weighted arithmetic, geometric and harmonic means of positive definite matrices.

For ``A, B > 0`` and a weight ``nu`` in ``[0, 1]``::

    A !_nu B  = (1 - nu) A + nu B
    A #_nu B  = A^{1/2} (A^{-1/2} B A^{-1/2})^nu A^{1/2}
    A !^_nu B = {(1 - nu) A^{-1} + nu B^{-1}}^{-1}

Each mean has a scalar representing function ``f(t) = 1 m t``; on commuting
inputs the mean acts eigenvalue-wise as ``a * f(b / a)``.
"""
from __future__ import annotations

import enum
from typing import Dict, Optional

import numpy as np

from .errors import DomainError, IllConditionedError, ShapeError
from .hermit import (
    COND_LIMIT,
    HermitianMatrix,
    MatrixLike,
    SpectralDecomposition,
    _power,
    as_hermitian,
    compose_stack,
    eigh,
    eigh_stack,
    herm_stack,
    hermitize,
)

SINGULAR_RTOL = 1e-14


class MeanKind(enum.Enum):
    ARITHMETIC = "am"
    GEOMETRIC = "gm"
    HARMONIC = "hm"

    @classmethod
    def parse(cls, value) -> "MeanKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        raise ValueError(f"unknown mean kind {value!r}; expected am, gm or hm")


def check_weight(nu) -> float:
    nu = float(nu)
    if not 0.0 <= nu <= 1.0:
        raise DomainError(f"weight nu must lie in [0, 1], got {nu!r}", nu)
    return nu


def _pd_decomposition(M: HermitianMatrix, name: str, *, cond_limit=None) -> SpectralDecomposition:
    d = eigh(M)
    lo, hi = d.lambda_min, d.lambda_max
    if lo <= 0:
        raise DomainError(f"{name} is not positive definite: eigenvalue {lo!r}", lo)
    if lo <= SINGULAR_RTOL * hi:
        raise IllConditionedError(
            f"{name} is numerically singular: eigenvalue {lo!r} vs largest {hi!r}", lo
        )
    if cond_limit is not None and hi > cond_limit * lo:
        raise IllConditionedError(
            f"{name} has condition number {hi / lo:.3e} > {cond_limit:.0e} "
            f"(smallest eigenvalue {lo!r})",
            lo,
        )
    return d


def _weights(nus) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(nus, dtype=float))
    if arr.ndim != 1:
        raise ValueError("weights must be a scalar or a 1-d sequence")
    bad = arr[~((arr >= 0.0) & (arr <= 1.0))]
    if bad.size:
        raise DomainError(f"weight nu must lie in [0, 1], got {bad[0]!r}", float(bad[0]))
    return arr


class PairMeans:
    """Validated pair ``(A, B)`` with cached spectral data for its means.

    Construction checks that both matrices are positive definite, have equal
    dimension and condition numbers below ``1e12``.  The eigendecompositions
    of ``A`` and of ``C = A^{-1/2} B A^{-1/2}`` are computed once.

    The ``*_stack`` methods take a sequence of ``k`` weights and return a
    read-only ``(k, n, n)`` array, one mean per weight; the single-weight
    methods return :class:`HermitianMatrix`.  Weights 0 and 1 give ``A`` and
    ``B`` exactly.
    """

    def __init__(self, A: MatrixLike, B: MatrixLike):
        A, B = as_hermitian(A), as_hermitian(B)
        if A.dim != B.dim:
            raise ShapeError(f"dimension mismatch: A is {A.dim}x{A.dim}, B is {B.dim}x{B.dim}")
        self.A, self.B = A, B
        self.dA = _pd_decomposition(A, "A", cond_limit=COND_LIMIT)
        self.dB = _pd_decomposition(B, "B", cond_limit=COND_LIMIT)
        self._cache: Dict[tuple, object] = {}
        self._dC: Optional[SpectralDecomposition] = None

    @property
    def dim(self) -> int:
        return self.A.dim

    def _memo(self, key, build):
        out = self._cache.get(key)
        if out is None:
            out = self._cache[key] = build()
        return out

    def sqrt_a(self) -> HermitianMatrix:
        return self._memo(("sqrtA",), lambda: self.dA.compose(np.sqrt(self.dA.eigenvalues)))

    def inv_sqrt_a(self) -> HermitianMatrix:
        return self._memo(
            ("isqrtA",), lambda: self.dA.compose(1.0 / np.sqrt(self.dA.eigenvalues))
        )

    def inv_a(self) -> HermitianMatrix:
        return self._memo(("invA",), lambda: self.dA.compose(1.0 / self.dA.eigenvalues))

    def inv_b(self) -> HermitianMatrix:
        return self._memo(("invB",), lambda: self.dB.compose(1.0 / self.dB.eigenvalues))

    def inner(self) -> SpectralDecomposition:
        """Decomposition of ``C = A^{-1/2} B A^{-1/2}`` (Hermitized)."""
        if self._dC is None:
            S = self.inv_sqrt_a().array
            self._dC = eigh(hermitize(S @ self.B.array @ S))
        return self._dC

    def _with_endpoints(self, nus, build):
        # interior weights go through build(); 0 and 1 are copied from A and B
        out = np.empty((nus.size, self.dim, self.dim), dtype=complex)
        inner = (nus > 0.0) & (nus < 1.0)
        out[nus == 0.0] = self.A.array
        out[nus == 1.0] = self.B.array
        if np.any(inner):
            out[inner] = build(nus[inner])
        out.setflags(write=False)
        return out

    def arithmetic_stack(self, nus) -> np.ndarray:
        nus = _weights(nus)

        def build(v):
            v = v[:, None, None]
            return herm_stack((1.0 - v) * self.A.array + v * self.B.array)

        return self._memo(("am", nus.tobytes()), lambda: self._with_endpoints(nus, build))

    def geometric_stack(self, nus) -> np.ndarray:
        nus = _weights(nus)

        def build(v):
            dC = self.inner()
            mu = np.clip(dC.eigenvalues, 0.0, None)
            with np.errstate(divide="ignore"):
                powers = np.exp(v[:, None] * np.log(mu)[None, :])
            Cnu = compose_stack(dC.eigenvectors[None], powers)
            R = self.sqrt_a().array
            return herm_stack(R @ Cnu @ R)

        return self._memo(("gm", nus.tobytes()), lambda: self._with_endpoints(nus, build))

    def harmonic_stack(self, nus) -> np.ndarray:
        nus = _weights(nus)

        def build(v):
            v = v[:, None, None]
            S = herm_stack((1.0 - v) * self.inv_a().array + v * self.inv_b().array)
            w, U = eigh_stack(S)
            return compose_stack(U, 1.0 / w)

        return self._memo(("hm", nus.tobytes()), lambda: self._with_endpoints(nus, build))

    def mean_stack(self, kind, nus) -> np.ndarray:
        kind = MeanKind.parse(kind)
        if kind is MeanKind.ARITHMETIC:
            return self.arithmetic_stack(nus)
        if kind is MeanKind.GEOMETRIC:
            return self.geometric_stack(nus)
        return self.harmonic_stack(nus)

    def mean(self, kind, nu) -> HermitianMatrix:
        nu = check_weight(nu)
        if nu == 0.0:
            return self.A
        if nu == 1.0:
            return self.B
        kind = MeanKind.parse(kind)
        return self._memo(
            (kind.value, "single", nu),
            lambda: HermitianMatrix._wrap(self.mean_stack(kind, [nu])[0]),
        )

    def arithmetic(self, nu) -> HermitianMatrix:
        return self.mean(MeanKind.ARITHMETIC, nu)

    def geometric(self, nu) -> HermitianMatrix:
        return self.mean(MeanKind.GEOMETRIC, nu)

    def harmonic(self, nu) -> HermitianMatrix:
        return self.mean(MeanKind.HARMONIC, nu)


def arithmetic_mean(A: MatrixLike, B: MatrixLike, nu) -> HermitianMatrix:
    """``(1 - nu) A + nu B`` for positive definite ``A``, ``B``."""
    return PairMeans(A, B).arithmetic(nu)


def geometric_mean(A: MatrixLike, B: MatrixLike, nu=0.5) -> HermitianMatrix:
    """Weighted geometric mean ``A #_nu B``.

    Computed literally as ``A^{1/2} (A^{-1/2} B A^{-1/2})^nu A^{1/2}`` with
    two Hermitian eigendecompositions; the inner congruence and the result
    are Hermitized.  ``nu = 0`` and ``nu = 1`` return ``A`` and ``B``
    unchanged.

    Raises
    ------
    DomainError
        If ``A`` or ``B`` is not positive definite, or ``nu`` is outside [0, 1].
    IllConditionedError
        If a condition number exceeds ``1e12``.
    """
    return PairMeans(A, B).geometric(nu)


def harmonic_mean(A: MatrixLike, B: MatrixLike, nu) -> HermitianMatrix:
    """``{(1 - nu) A^{-1} + nu B^{-1}}^{-1}`` for positive definite ``A``, ``B``."""
    return PairMeans(A, B).harmonic(nu)


def mean(kind, A: MatrixLike, B: MatrixLike, nu) -> HermitianMatrix:
    return PairMeans(A, B).mean(kind, nu)


def representing_function(kind, nu, t):
    """Scalar representing function ``f(t) = 1 m t`` of a weighted mean.

    Accepts scalar or array ``t``; all entries must be positive.  As with the
    matrix means, ``nu = 0`` gives exactly 1 and ``nu = 1`` exactly ``t``.

    >>> representing_function("gm", 0.5, 4.0)
    2.0
    """
    kind = MeanKind.parse(kind)
    nu = check_weight(nu)
    t_arr = np.asarray(t, dtype=float)
    if not np.all(t_arr > 0):
        raise DomainError(f"t must be positive, got {t!r}", t)
    if nu == 0.0:
        out = np.ones_like(t_arr)
    elif nu == 1.0:
        out = t_arr.copy()
    elif kind is MeanKind.ARITHMETIC:
        out = (1.0 - nu) + nu * t_arr
    elif kind is MeanKind.GEOMETRIC:
        out = _power(t_arr, nu)
    else:
        out = 1.0 / ((1.0 - nu) + nu / t_arr)
    return float(out) if out.ndim == 0 else out
