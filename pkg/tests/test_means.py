import numpy as np
import pytest
from hypothesis import given, strategies as st

from opmeans.errors import DomainError, IllConditionedError, ShapeError
from opmeans.hermit import HermitianMatrix, apply_spectral_function, eigh
from opmeans.means import (
    MeanKind,
    PairMeans,
    arithmetic_mean,
    geometric_mean,
    harmonic_mean,
    mean,
    representing_function,
)
from opmeans.sampling import SampleConfig, commuting_spectra, log_grid, random_hpd

from conftest import pd_pairs, rel_err

KINDS = list(MeanKind)
weights = st.floats(0.0, 1.0)


def test_kind_parse():
    assert MeanKind.parse("gm") is MeanKind.GEOMETRIC
    assert MeanKind.parse("Harmonic") is MeanKind.HARMONIC
    with pytest.raises(ValueError):
        MeanKind.parse("log")


class TestExamples:
    def test_arithmetic(self):
        A = HermitianMatrix.diag([1, 2])
        out = arithmetic_mean(A, HermitianMatrix.diag([3, 6]), 0.5)
        np.testing.assert_allclose(out.array, np.diag([2, 4]))
        assert arithmetic_mean(A, A, 0.37) == A

    def test_geometric_identity_left(self):
        out = geometric_mean(HermitianMatrix.identity(2), HermitianMatrix.diag([4, 9]), 0.5)
        np.testing.assert_allclose(out.array, np.diag([2, 3]), atol=1e-14)

    def test_geometric_is_sqrt_against_identity(self):
        A = HermitianMatrix([[2.0, 1.0], [1.0, 2.0]])
        out = geometric_mean(A, HermitianMatrix.identity(2), 0.5)
        expected = apply_spectral_function(A, "sqrt").array
        np.testing.assert_allclose(out.array, expected, atol=1e-14)
        np.testing.assert_allclose(out.array.real, [[1.3660254, 0.3660254], [0.3660254, 1.3660254]], atol=1e-7)

    def test_geometric_commuting(self):
        out = geometric_mean(HermitianMatrix.diag([1, 2]), HermitianMatrix.diag([3, 6]))
        np.testing.assert_allclose(out.array, np.diag([np.sqrt(3), 2 * np.sqrt(3)]), atol=1e-14)

    def test_harmonic(self):
        assert harmonic_mean([[1.0]], [[3.0]], 0.5).array[0, 0] == pytest.approx(1.5, abs=1e-15)
        A = random_hpd(SampleConfig(3, 4))
        B = random_hpd(SampleConfig(3, 5))
        assert rel_err(harmonic_mean(A, A, 0.6).array, A.array) < 1e-13
        assert harmonic_mean(A, B, 1.0) == B


class TestErrors:
    def test_non_pd(self):
        with pytest.raises(DomainError, match="eigenvalue"):
            geometric_mean(HermitianMatrix.diag([1, -1]), HermitianMatrix.identity(2))

    def test_singular(self):
        with pytest.raises(IllConditionedError):
            harmonic_mean(HermitianMatrix.diag([1, 1e-15]), HermitianMatrix.identity(2), 0.5)

    def test_condition_limit(self):
        with pytest.raises(IllConditionedError):
            geometric_mean(HermitianMatrix.diag([1, 1e-13 * 5]), HermitianMatrix.identity(2))

    def test_dims(self):
        with pytest.raises(ShapeError):
            arithmetic_mean(HermitianMatrix.identity(2), HermitianMatrix.identity(3), 0.5)

    @pytest.mark.parametrize("nu", [-0.1, 1.5, np.nan])
    def test_weight(self, nu):
        with pytest.raises(DomainError):
            mean("gm", HermitianMatrix.identity(2), HermitianMatrix.identity(2), nu)


class TestProperties:
    @pytest.mark.parametrize("kind", KINDS)
    @given(pair=pd_pairs())
    def test_boundary_weights(self, kind, pair):
        A, B = pair
        assert mean(kind, A, B, 0.0) == A
        assert mean(kind, A, B, 1.0) == B

    @pytest.mark.parametrize("kind", KINDS)
    @given(pair=pd_pairs(), nu=weights)
    def test_weight_swap(self, kind, pair, nu):
        A, B = pair
        assert rel_err(mean(kind, A, B, nu).array, mean(kind, B, A, 1 - nu).array) <= 1e-10

    @given(pair=pd_pairs(), nu=weights, seed=st.integers(0, 2**32 - 1))
    def test_congruence_invariance(self, pair, nu, seed):
        A, B = pair
        n = A.dim
        rng = np.random.default_rng(seed)
        U, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        W, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        T = U @ np.diag(np.geomspace(1.0, 1e4, n) if n > 1 else [3.0]) @ W
        assert np.linalg.cond(T) <= 1e4 * (1 + 1e-9)
        lhs = T @ geometric_mean(A, B, nu).array @ T.conj().T
        rhs = geometric_mean(A.congruence(T), B.congruence(T), nu).array
        assert rel_err(rhs, lhs) <= 1e-8

    @pytest.mark.parametrize("kind", KINDS)
    @given(dim=st.integers(1, 8), seed=st.integers(0, 2**32 - 1), nu=weights)
    def test_commuting_reduction(self, kind, dim, seed, nu):
        Q, a, b = commuting_spectra(SampleConfig(dim, seed))
        A = HermitianMatrix(Q @ np.diag(a) @ Q.conj().T)
        B = HermitianMatrix(Q @ np.diag(b) @ Q.conj().T)
        M = mean(kind, A, B, nu).array
        diag = np.real(np.einsum("ji,jk,ki->i", Q.conj(), M, Q))
        expected = a * representing_function(kind, nu, b / a)
        np.testing.assert_allclose(diag, expected, rtol=0, atol=1e-10 * max(1, np.max(np.abs(expected))))

    @pytest.mark.parametrize("kind", KINDS)
    @given(a=st.floats(1e-3, 1e3), b=st.floats(1e-3, 1e3), nu=weights)
    def test_one_by_one(self, kind, a, b, nu):
        out = mean(kind, [[a]], [[b]], nu).array[0, 0]
        expected = a * representing_function(kind, nu, b / a)
        assert abs(out - expected) <= 1e-12 * max(1.0, abs(expected))

    @given(nu=weights)
    def test_scalar_ordering(self, nu):
        t = log_grid(1e-4, 1e4, 2001)
        am = representing_function("am", nu, t)
        gm = representing_function("gm", nu, t)
        hm = representing_function("hm", nu, t)
        scale = np.maximum(1.0, am)
        assert np.all(am - gm >= -1e-15 * scale)
        assert np.all(gm - hm >= -1e-15 * scale)


class TestRepresentingFunction:
    def test_examples(self):
        assert representing_function("gm", 0.5, 4.0) == 2.0
        assert representing_function("am", 0.3, 4.0) == pytest.approx(1.9, abs=1e-15)
        for nu in (0.0, 0.2, 0.9, 1.0):
            assert representing_function("hm", nu, 1.0) == 1.0

    def test_array(self):
        out = representing_function("gm", 0.5, np.array([1.0, 4.0, 9.0]))
        np.testing.assert_allclose(out, [1, 2, 3])

    def test_domain(self):
        with pytest.raises(DomainError):
            representing_function("am", 0.5, 0.0)


def test_pair_means_stack_matches_single():
    A, B = random_hpd(SampleConfig(4, 1)), random_hpd(SampleConfig(4, 2))
    pair = PairMeans(A, B)
    nus = np.array([0.0, 0.25, 0.5, 1.0])
    for kind in KINDS:
        stack = pair.mean_stack(kind, nus)
        assert not stack.flags.writeable
        for nu, M in zip(nus, stack):
            np.testing.assert_allclose(M, mean(kind, A, B, nu).array, atol=1e-13)


def test_geometric_mean_inner_spectrum():
    A, B = random_hpd(SampleConfig(3, 8)), random_hpd(SampleConfig(3, 9))
    G = geometric_mean(A, B, 0.5)
    # A # B is the unique PD solution of X A^{-1} X = B
    Ai = apply_spectral_function(A, "inverse").array
    assert rel_err(G.array @ Ai @ G.array, B.array) < 1e-12
    assert eigh(G).lambda_min > 0
