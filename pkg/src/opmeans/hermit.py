"""Dense Hermitian linear algebra.

Eigendecomposition, matrix functions through the spectral theorem,
Hermitization and a tolerance-aware Loewner order comparison.  Everything
operates on :class:`HermitianMatrix`, an immutable wrapper around a complex
``numpy`` array; real input is stored as complex with zero imaginary part.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple, Optional, Union

import numpy as np

from .errors import (
    DomainError,
    IllConditionedError,
    NotHermitianError,
    NumericalError,
    ShapeError,
)

HERMITIAN_RTOL = 1e-12
DEFAULT_TOL = 1e-9
COND_LIMIT = 1e12


class HermitianMatrix:
    """Square complex matrix equal to its conjugate transpose.

    The constructor verifies ``|M - M^*| <= 1e-12 * max|M|`` entrywise and then
    stores the Hermitized array, so the stored entries are exactly Hermitian.
    The underlying array is read-only.

    Arithmetic with ``+``, ``-`` and real scalars returns new Hermitian
    matrices.
    """

    __slots__ = ("_data", "_norm2")
    __array_priority__ = 1000

    def __init__(self, data, *, check: bool = True):
        self._norm2 = None
        if isinstance(data, HermitianMatrix):
            self._data = data._data
            return
        arr = np.array(data, dtype=complex)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ShapeError(f"expected a non-empty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("matrix has non-finite entries")
        if check:
            scale = np.max(np.abs(arr))
            dev = np.max(np.abs(arr - arr.conj().T))
            if dev > HERMITIAN_RTOL * scale:
                raise NotHermitianError(
                    f"matrix is not Hermitian: max |M - M*| = {dev:.3e}, "
                    f"max |M| = {scale:.3e}"
                )
        arr = 0.5 * (arr + arr.conj().T)
        arr.setflags(write=False)
        self._data = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "HermitianMatrix":
        # arr must already be exactly Hermitian
        obj = cls.__new__(cls)
        arr = np.asarray(arr, dtype=complex)
        arr.setflags(write=False)
        obj._data = arr
        obj._norm2 = None
        return obj

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls._wrap(np.eye(dim, dtype=complex))

    @classmethod
    def diag(cls, values) -> "HermitianMatrix":
        values = np.asarray(values, dtype=float)
        return cls._wrap(np.diag(values).astype(complex))

    @property
    def array(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    @property
    def shape(self):
        return self._data.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data
        return self._data.astype(dtype)

    def __repr__(self):
        return f"HermitianMatrix({np.array2string(self._data, precision=6)})"

    def __eq__(self, other):
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(np.all(self._data == other._data))

    __hash__ = None

    def _check_dim(self, other: "HermitianMatrix"):
        if other.dim != self.dim:
            raise ShapeError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        self._check_dim(other)
        return hermitize(self._data + other._data)

    def __sub__(self, other):
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        self._check_dim(other)
        return hermitize(self._data - other._data)

    def __neg__(self):
        return HermitianMatrix._wrap(-self._data)

    def __mul__(self, scalar):
        if isinstance(scalar, (bool, np.bool_)) or not np.isreal(scalar) or np.ndim(scalar) != 0:
            return NotImplemented
        return hermitize(float(np.real(scalar)) * self._data)

    __rmul__ = __mul__

    def congruence(self, T) -> "HermitianMatrix":
        """Return ``T H T^*``."""
        T = np.asarray(T, dtype=complex)
        if T.ndim != 2 or T.shape[1] != self.dim:
            raise ShapeError(f"cannot form T H T* with T of shape {T.shape}")
        return hermitize(T @ self._data @ T.conj().T)

    def norm2(self) -> float:
        """Spectral norm (largest absolute eigenvalue)."""
        if self._norm2 is None:
            w = np.linalg.eigvalsh(self._data)
            self._norm2 = float(max(abs(w[0]), abs(w[-1])))
        return self._norm2

    def to_dict(self) -> dict:
        return matrix_to_dict(self)


MatrixLike = Union[HermitianMatrix, np.ndarray, list]


def as_hermitian(M: MatrixLike) -> HermitianMatrix:
    if isinstance(M, HermitianMatrix):
        return M
    return HermitianMatrix(M)


def hermitize(M) -> HermitianMatrix:
    """Return ``(M + M^*)/2`` without any symmetry check.

    >>> hermitize([[0, 1], [0, 0]]).array.real
    array([[0. , 0.5],
           [0.5, 0. ]])
    """
    if isinstance(M, HermitianMatrix):
        return M
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ShapeError(f"expected a non-empty square matrix, got shape {arr.shape}")
    return HermitianMatrix._wrap(0.5 * (arr + arr.conj().T))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and the matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def condition_number(self) -> float:
        lo, hi = np.min(np.abs(self.eigenvalues)), np.max(np.abs(self.eigenvalues))
        return np.inf if lo == 0 else float(hi / lo)

    def compose(self, values) -> HermitianMatrix:
        """Return ``V diag(values) V^*``, Hermitized."""
        V = self.eigenvectors
        return hermitize((V * np.asarray(values)) @ V.conj().T)

    def reconstruct(self) -> HermitianMatrix:
        return self.compose(self.eigenvalues)


def _fix_phases(V: np.ndarray) -> np.ndarray:
    # make the largest-modulus entry of each column real positive; V may be stacked
    idx = np.argmax(np.abs(V), axis=-2)[..., None, :]
    pivots = np.take_along_axis(V, idx, axis=-2)
    return V * (np.abs(pivots) / pivots)


def herm_stack(X: np.ndarray) -> np.ndarray:
    """``(X + X^*)/2`` over the last two axes."""
    return 0.5 * (X + np.conj(np.swapaxes(X, -1, -2)))


def eigh_stack(X: np.ndarray):
    """Eigenvalues and phase-normalized eigenvectors of a stack of Hermitian arrays."""
    try:
        w, V = np.linalg.eigh(X)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition did not converge: {exc}") from exc
    return w, _fix_phases(V)


def compose_stack(V: np.ndarray, values: np.ndarray) -> np.ndarray:
    """``V diag(values) V^*`` for stacked ``V`` and ``values``, Hermitized."""
    return herm_stack((V * values[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2)))


def eigh(H: MatrixLike) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Backed by LAPACK's Hermitian driver through :func:`numpy.linalg.eigh`.
    Eigenvector phases are normalized so the largest-modulus component of
    each column is real and positive.

    Raises
    ------
    NotHermitianError
        If ``H`` is an array that fails the Hermiticity check.
    NumericalError
        If the LAPACK driver does not converge.
    """
    H = as_hermitian(H)
    w, V = eigh_stack(H.array)
    w.setflags(write=False)
    V.setflags(write=False)
    return SpectralDecomposition(w, V)


def _power(values: np.ndarray, p: float) -> np.ndarray:
    # t**p as exp(p ln t); zero maps to zero for p > 0
    values = np.asarray(values, dtype=float)
    if p == 0:
        return np.ones_like(values)
    with np.errstate(divide="ignore"):
        out = np.exp(p * np.log(values))
    return np.where(values == 0, 0.0, out) if p > 0 else out


def _positive(name: str) -> Callable[[np.ndarray], bool]:
    def check(w):
        return bool(np.all(w > 0))

    check.__name__ = name
    return check


def _nonnegative(w):
    return bool(np.all(w >= 0))


class _SpectralFn(NamedTuple):
    fn: Callable[[np.ndarray], np.ndarray]
    domain: Callable[[np.ndarray], bool]
    needs_inverse: bool


SPECTRAL_FUNCTIONS = {
    "sqrt": _SpectralFn(np.sqrt, _nonnegative, False),
    "inv_sqrt": _SpectralFn(lambda w: 1.0 / np.sqrt(w), _positive("positive"), True),
    "inverse": _SpectralFn(lambda w: 1.0 / w, _positive("positive"), True),
    "log": _SpectralFn(np.log, _positive("positive"), False),
    "exp": _SpectralFn(np.exp, lambda w: True, False),
    "abs": _SpectralFn(np.abs, lambda w: True, False),
}


def _guard(decomp: SpectralDecomposition, tag: str):
    w = decomp.eigenvalues
    if w[0] <= 0:
        raise DomainError(
            f"eigenvalue {w[0]!r} outside the domain of {tag!r} (must be > 0)", w[0]
        )
    if w[-1] > COND_LIMIT * w[0]:
        raise IllConditionedError(
            f"condition number {w[-1] / w[0]:.3e} exceeds {COND_LIMIT:.0e} for {tag!r} "
            f"(smallest eigenvalue {w[0]!r})",
            w[0],
        )


def apply_spectral_function(
    H: MatrixLike,
    func: Union[str, Callable[[np.ndarray], np.ndarray]],
    domain: Optional[Callable[[np.ndarray], bool]] = None,
    *,
    decomposition: Optional[SpectralDecomposition] = None,
) -> HermitianMatrix:
    """Return ``V func(Lambda) V^*`` for ``H = V Lambda V^*``.

    Parameters
    ----------
    H : HermitianMatrix or array_like
    func : str or callable
        A tag from :data:`SPECTRAL_FUNCTIONS` (``"sqrt"``, ``"inv_sqrt"``,
        ``"inverse"``, ``"log"``, ``"exp"``, ``"abs"``) or a vectorized
        real function of the eigenvalues.
    domain : callable, optional
        Predicate on the eigenvalue array.  Overrides the tag's own domain.
    decomposition : SpectralDecomposition, optional
        Precomputed decomposition of ``H``, to avoid repeating the solve.

    Raises
    ------
    DomainError
        When an eigenvalue lies outside the domain; the message names it.
    IllConditionedError
        For inverse-type tags when ``cond(H) > 1e12``.
    """
    d = decomposition if decomposition is not None else eigh(H)
    if isinstance(func, str):
        try:
            spec = SPECTRAL_FUNCTIONS[func]
        except KeyError:
            raise ValueError(f"unknown spectral function {func!r}") from None
        if spec.needs_inverse and domain is None:
            _guard(d, func)
        fn, dom, tag = spec.fn, domain or spec.domain, func
    else:
        fn, dom, tag = func, domain, getattr(func, "__name__", "function")
    w = d.eigenvalues
    if dom is not None and not dom(w):
        bad = [float(x) for x in w if not dom(np.array([x]))]
        offending = bad[0] if bad else float(w[0])
        raise DomainError(f"eigenvalue {offending!r} outside the domain of {tag!r}", offending)
    return d.compose(fn(w))


def matrix_power(H: MatrixLike, p: float, *, decomposition=None) -> HermitianMatrix:
    """``H**p`` for real ``p``, with eigenvalue powers taken as ``exp(p ln w)``.

    Negative ``p`` requires a positive definite ``H`` with ``cond(H) <= 1e12``.
    """
    d = decomposition if decomposition is not None else eigh(H)
    if p < 0:
        _guard(d, f"power {p}")
    elif p > 0 and d.eigenvalues[0] < 0:
        raise DomainError(
            f"eigenvalue {d.eigenvalues[0]!r} outside the domain of power {p}",
            float(d.eigenvalues[0]),
        )
    return d.compose(_power(d.eigenvalues, p))


class PSDVerdict(NamedTuple):
    is_psd: bool
    lambda_min: float
    witness: np.ndarray


def psd_verdict(M: MatrixLike, tol: float = DEFAULT_TOL) -> PSDVerdict:
    """Decide positive semidefiniteness with a relative tolerance.

    ``M`` counts as PSD when ``lambda_min >= -tol * max(1, max|lambda|)``.
    The witness is a unit eigenvector for ``lambda_min``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    d = eigh(M)
    w = d.eigenvalues
    scale = max(1.0, abs(float(w[0])), abs(float(w[-1])))
    lam = float(w[0])
    return PSDVerdict(lam >= -tol * scale, lam, np.array(d.eigenvectors[:, 0]))


class LoewnerRelation(enum.Enum):
    LE = "LE"
    GE = "GE"
    EQ = "EQ"
    INCOMPARABLE = "INCOMPARABLE"


@dataclass(frozen=True)
class LoewnerVerdict:
    """Outcome of comparing ``A`` and ``B`` in the Loewner order.

    ``margin_le`` is ``lambda_min(B - A)`` and ``margin_ge`` is
    ``lambda_min(A - B)``; the two witnesses are eigenvectors attaining them.
    """

    relation: LoewnerRelation
    margin_le: float
    margin_ge: float
    witness_le: np.ndarray
    witness_ge: np.ndarray

    @property
    def is_le(self) -> bool:
        return self.relation in (LoewnerRelation.LE, LoewnerRelation.EQ)

    @property
    def is_ge(self) -> bool:
        return self.relation in (LoewnerRelation.GE, LoewnerRelation.EQ)

    @property
    def witness(self):
        """``(eigenvalue, vector)`` pairs for the failing directions, or None."""
        if self.relation is LoewnerRelation.INCOMPARABLE:
            return ((self.margin_le, self.witness_le), (self.margin_ge, self.witness_ge))
        if self.relation is LoewnerRelation.LE and self.margin_ge < 0:
            return ((self.margin_ge, self.witness_ge),)
        if self.relation is LoewnerRelation.GE and self.margin_le < 0:
            return ((self.margin_le, self.witness_le),)
        return None


def loewner_compare(A: MatrixLike, B: MatrixLike, tol: float = DEFAULT_TOL) -> LoewnerVerdict:
    A, B = as_hermitian(A), as_hermitian(B)
    if A.dim != B.dim:
        raise ShapeError(f"dimension mismatch: {A.dim} vs {B.dim}")
    le = psd_verdict(B - A, tol)
    ge = psd_verdict(A - B, tol)
    if le.is_psd and ge.is_psd:
        rel = LoewnerRelation.EQ
    elif le.is_psd:
        rel = LoewnerRelation.LE
    elif ge.is_psd:
        rel = LoewnerRelation.GE
    else:
        rel = LoewnerRelation.INCOMPARABLE
    return LoewnerVerdict(rel, le.lambda_min, ge.lambda_min, le.witness, ge.witness)


# -- JSON matrix format: {"dim": n, "real": [[...]], "imag": [[...]]} -------------


def matrix_from_dict(obj: dict) -> HermitianMatrix:
    try:
        n = int(obj["dim"])
        real = np.asarray(obj["real"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    imag = np.asarray(obj.get("imag", np.zeros((n, n))), dtype=float)
    if real.shape != (n, n) or imag.shape != (n, n):
        raise ShapeError(f"matrix arrays do not match dim={n}: {real.shape}, {imag.shape}")
    return HermitianMatrix(real + 1j * imag)


def matrix_to_dict(M: MatrixLike, *, include_imag: Optional[bool] = None) -> dict:
    arr = np.asarray(as_hermitian(M).array)
    out = {"dim": int(arr.shape[0]), "real": arr.real.tolist()}
    if include_imag or (include_imag is None and np.any(arr.imag != 0)):
        out["imag"] = arr.imag.tolist()
    return out


def load_matrix(path: Union[str, Path]) -> HermitianMatrix:
    with open(path) as fh:
        return matrix_from_dict(json.load(fh))


def save_matrix(M: MatrixLike, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_dict(M), fh)
