"""Weighted operator means of positive definite matrices and checks of the
inequalities between them."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    IllConditionedError,
    NotHermitianError,
    NumericalError,
    OpMeansError,
    ShapeError,
    UnknownStatementError,
)
from .hermit import (
    HermitianMatrix,
    LoewnerRelation,
    LoewnerVerdict,
    SpectralDecomposition,
    apply_spectral_function,
    eigh,
    hermitize,
    loewner_compare,
    matrix_power,
    psd_verdict,
)
from .means import (
    MeanKind,
    PairMeans,
    arithmetic_mean,
    geometric_mean,
    harmonic_mean,
    mean,
    representing_function,
)
