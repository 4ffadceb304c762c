import numpy as np
import pytest
from hypothesis import settings, strategies as st

from opmeans.hermit import HermitianMatrix
from opmeans.sampling import SampleConfig, random_hpd

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_hermitian(rng, dim, scale=1.0):
    X = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianMatrix(scale * (X + X.conj().T) / 2)


@st.composite
def hermitian_matrices(draw, min_dim=1, max_dim=8):
    dim = draw(st.integers(min_dim, max_dim))
    seed = draw(st.integers(0, 2**32 - 1))
    scale = draw(st.sampled_from([1e-3, 1.0, 1e3]))
    return random_hermitian(np.random.default_rng(seed), dim, scale)


@st.composite
def pd_pairs(draw, min_dim=1, max_dim=8):
    dim = draw(st.integers(min_dim, max_dim))
    seed = draw(st.integers(0, 2**32 - 1))
    A = random_hpd(SampleConfig(dim, seed))
    B = random_hpd(SampleConfig(dim, seed + 1))
    return A, B


def rel_err(X, Y):
    X, Y = np.asarray(X), np.asarray(Y)
    return np.linalg.norm(X - Y) / max(np.linalg.norm(Y), 1e-300)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    rows = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when != "call" and not (key == "error"):
                continue
            crit = dict(rep.user_properties).get("criterion")
            if crit is None:
                continue
            ok = rows.get(crit, (True, ""))[0] and key == "passed"
            rows[crit] = (ok, dict(rep.user_properties).get("title", ""))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(rows):
        ok, title = rows[crit]
        terminalreporter.write_line(f"criterion {crit:>2}: {'PASS' if ok else 'FAIL'}  {title}")
