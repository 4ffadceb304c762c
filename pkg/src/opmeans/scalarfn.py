"""Scalar functions behind the mean inequalities.

All functions accept a scalar or an array ``t > 0`` and return the same
shape.  Real powers, square roots included, are evaluated as
``exp(p * log t)`` so that identical powers cancel exactly.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .means import MeanKind, check_weight, representing_function


def _t(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"t must be positive, got {t!r}", t)
    return arr


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _pow(t, p):
    return np.exp(p * np.log(t))


def gap_expr(r, t):
    """``2t/(t+1) - r sqrt(t) - (1-r)(t+1)/2``.

    Harmonic mean minus the ``r``-combination of geometric and arithmetic
    means for the pair ``(1, t)`` at weight 1/2.  Nonnegative for ``r >= 2``,
    nonpositive for ``r <= 1``, and of both signs for ``1 < r < 2``.
    """
    t = _t(t)
    r = float(r)
    return _out(2.0 * t / (t + 1.0) - r * _pow(t, 0.5) - (1.0 - r) * (t + 1.0) / 2.0)


def _rf(kind, nu, t):
    return representing_function(kind, nu, t)


def lemma_f(nu, t):
    """``t^nu - sqrt(t) - (nu - 1/2)(t - 1)``.

    Terms are grouped as ``t^nu - (sqrt(t) + (nu - 1/2)(t - 1))`` with the
    powers taken from the representing functions, the same rounding path as
    the operator statement this function certifies.
    """
    nu = check_weight(nu)
    t = _t(t)
    gm = _rf(MeanKind.GEOMETRIC, nu, t)
    return _out(gm - (_rf(MeanKind.GEOMETRIC, 0.5, t) + (nu - 0.5) * (t + -1.0)))


def lemma_g(nu, t):
    """``(1-nu) + nu t + t/((1-nu) t + nu) - 2 t^nu``.

    Evaluated as ``(am + hm) - 2 gm`` from the representing functions, so
    that ``lemma_g / 2`` rounds exactly like ``(am + hm)/2 - gm``.
    """
    nu = check_weight(nu)
    t = _t(t)
    am = _rf(MeanKind.ARITHMETIC, nu, t)
    hm = _rf(MeanKind.HARMONIC, nu, t)
    return _out((am + hm) - 2.0 * _rf(MeanKind.GEOMETRIC, nu, t))


def lemma_h(nu, t):
    """``(1-nu) + nu t - ((1-nu) t + nu) t^(2nu-1)``."""
    nu = check_weight(nu)
    t = _t(t)
    return _out((1.0 - nu) + nu * t - ((1.0 - nu) * t + nu) * _pow(t, 2.0 * nu - 1.0))


def k_fn(r, nu, t):
    """``r t^nu + (1-r)((1-nu) + nu t)``, non-increasing in ``r``.

    Evaluated as ``am + r (t^nu - am)``: for a fixed ``(nu, t)`` the rounded
    result is then monotone in ``r`` as well.
    """
    nu = check_weight(nu)
    t = _t(t)
    am = (1.0 - nu) + nu * t
    return _out(am + float(r) * (_pow(t, nu) - am))


_SMALL_DELTA = 1e-8


def inflection_t(nu) -> float:
    """Zero of the second derivative of :func:`lemma_f` in ``t``.

    ``{4 nu (1 - nu)}^(2/(1 - 2nu))`` for ``0 < nu < 1``.  Writing
    ``d = 1 - 2nu`` the base is ``1 - d^2`` and the exponent of ``e`` is
    ``2 log1p(-d^2)/d``, which tends to ``-2d`` as ``d -> 0``; the value at
    ``nu = 1/2`` is the limit 1.
    """
    nu = float(nu)
    if not 0.0 < nu < 1.0:
        raise DomainError(f"inflection_t needs 0 < nu < 1, got {nu!r}", nu)
    d = 1.0 - 2.0 * nu
    if abs(d) < _SMALL_DELTA:
        return math.exp(-2.0 * d)
    return math.exp(2.0 * math.log1p(-d * d) / d)
