import numpy as np
import pytest
from hypothesis import given, strategies as st

from opmeans import scalarfn as sf
from opmeans.catalog import (
    OperatorInstance,
    ScalarParams,
    Verdict,
    check_operator_grid,
    check_operator_instance,
    check_scalar_instance,
    get_statement,
    kubo_ando_consistency,
    list_statements,
)
from opmeans.errors import DomainError, ShapeError, UnknownStatementError
from opmeans.hermit import HermitianMatrix
from opmeans.means import MeanKind
from opmeans.sampling import SampleConfig, random_hpd, random_ordered_pair

IDS = [
    "YOUNG_AM_GM", "YOUNG_GM_HM", "PROP11_I", "PROP11_II", "THM21_LOWER", "THM21_UPPER",
    "REM22", "LEM25", "LEM26", "COR27_I", "COR27_II",
]


class TestListing:
    def test_ids(self):
        assert [s.id for s in list_statements()] == IDS

    def test_unknown(self):
        with pytest.raises(UnknownStatementError):
            get_statement("NOPE")

    def test_young_lookup(self):
        s = get_statement("YOUNG_AM_GM")
        assert s.lhs.kind is MeanKind.GEOMETRIC and s.lhs.nu == "nu"
        assert s.rhs.kind is MeanKind.ARITHMETIC
        assert s.param_names == ("nu",) and not s.has_order_condition
        assert s.validate_params({"nu": 0.0}) and s.validate_params({"nu": 1.0})
        with pytest.raises(DomainError):
            s.validate_params({"nu": 1.2})

    def test_thm21_lookup(self):
        s = get_statement("THM21_LOWER")
        assert str(s.lhs) == "A #_1/2 B + (nu - 1/2)*(B - A)"
        assert str(s.rhs) == "A #_nu B"
        assert s.rhs.kind is MeanKind.GEOMETRIC
        assert s.has_order_condition

    def test_boundary_conventions(self):
        # THM21 uses a closed weight range, COR27_I a half-open one
        thm, cor = get_statement("THM21_LOWER"), get_statement("COR27_I")
        assert thm.branch_for({"nu": 0.0}) is not None
        assert cor.branch_for({"r": 2.0, "nu": 0.0}) is None
        assert get_statement("COR27_II").branch_for({"r": 0.0, "nu": 1.0}) is None
        assert get_statement("LEM26").branch_for({"r": 0.0, "nu": 1.0}) is not None

    def test_grids_are_admissible(self):
        for s in list_statements():
            for p in s.grid():
                s.validate_params(p)


class TestScalar:
    def test_prop11_example(self):
        res = check_scalar_instance("PROP11_I", {"r": 2.0, "t": 4.0})
        assert res.margin == pytest.approx(0.1, abs=1e-14)
        assert res.verdict is Verdict.HOLDS

    def test_thm21_examples(self):
        lo = check_scalar_instance("THM21_LOWER", ScalarParams(t=4.0, nu=0.3))
        up = check_scalar_instance("THM21_UPPER", ScalarParams(t=4.0, nu=0.3))
        assert lo.margin == pytest.approx(0.115717, abs=1e-6)
        assert up.margin == pytest.approx(0.079444, abs=1e-6)
        assert lo.verdict is up.verdict is Verdict.HOLDS

    @given(nu=st.floats(0.0, 1.0), t=st.floats(1e-2, 1e2))
    def test_thm21_identities(self, nu, t):
        lo = check_scalar_instance("THM21_LOWER", {"nu": nu, "t": t}, force=True)
        up = check_scalar_instance("THM21_UPPER", {"nu": nu, "t": t}, force=True)
        assert abs(lo.margin - sf.lemma_f(nu, t)) <= 1e-13
        assert abs(up.margin - sf.lemma_g(nu, t) / 2) <= 1e-13

    def test_condition_maps_to_t(self):
        # nu <= 1/2 requires A <= B, i.e. t >= 1
        assert check_scalar_instance("THM21_LOWER", {"nu": 0.25, "t": 0.5}).verdict is Verdict.NOT_APPLICABLE
        assert check_scalar_instance("THM21_LOWER", {"nu": 0.75, "t": 0.5}).verdict is Verdict.HOLDS

    def test_errors(self):
        with pytest.raises(DomainError):
            check_scalar_instance("PROP11_I", {"r": 2.0, "t": 0.0})
        with pytest.raises(UnknownStatementError):
            check_scalar_instance("X", {"t": 1.0})

    def test_forced_outside_regime(self):
        res = check_scalar_instance("PROP11_I", {"r": 1.5, "t": 2.0}, force=True)
        assert res.forced and not res.condition_met
        assert res.margin == pytest.approx(sf.gap_expr(1.5, 2.0), abs=1e-15)
        assert res.verdict is Verdict.VIOLATED


class TestOperator:
    def test_young_equal_pair(self):
        A = HermitianMatrix.diag([2.0, 3.0])
        res = check_operator_instance("YOUNG_AM_GM", A, A, {"nu": 0.7})
        assert res.margin == pytest.approx(0.0, abs=1e-14)
        assert res.verdict is Verdict.HOLDS

    def test_prop11_one_by_one(self):
        res = check_operator_instance("PROP11_I", [[1.0]], [[4.0]], {"r": 2.0})
        assert res.margin == pytest.approx(0.1, abs=1e-14)

    def test_thm21_scaled_identity(self):
        res = check_operator_instance(
            "THM21_LOWER", HermitianMatrix.identity(2), 4.0 * HermitianMatrix.identity(2), {"nu": 0.3}
        )
        assert res.margin == pytest.approx(0.115717, abs=1e-6)
        assert res.verdict is Verdict.HOLDS

    def test_errors(self):
        with pytest.raises(ShapeError):
            check_operator_instance("YOUNG_AM_GM", np.eye(2), np.eye(3), {"nu": 0.5})
        with pytest.raises(DomainError):
            check_operator_instance("YOUNG_AM_GM", np.diag([1.0, -1.0]), np.eye(2), {"nu": 0.5})
        with pytest.raises(UnknownStatementError):
            check_operator_instance("X", np.eye(2), np.eye(2), {})

    @pytest.mark.parametrize("sid", IDS)
    @given(a=st.floats(1e-2, 1e2), b=st.floats(1e-2, 1e2), data=st.data())
    def test_one_by_one_matches_scalar(self, sid, a, b, data):
        stmt = get_statement(sid)
        params = data.draw(st.sampled_from(stmt.grid()))
        op = check_operator_instance(stmt, [[a]], [[b]], params, force=True)
        sc = check_scalar_instance(stmt, dict(params, t=b / a), force=True)
        # congruence by a^{-1/2}: operator margin is a times the scalar margin
        assert abs(op.margin - a * sc.margin) <= 1e-12 * max(1.0, a * sc.scale)

    def test_conditions_enforced(self):
        A, B = random_ordered_pair(SampleConfig(3, 21))
        # A <= B strictly: the high-nu branch needs B <= A
        res = check_operator_instance("THM21_LOWER", A, B, {"nu": 0.75})
        assert res.verdict is Verdict.NOT_APPLICABLE and res.margin is None
        assert check_operator_instance("THM21_LOWER", B, A, {"nu": 0.75}).verdict is Verdict.HOLDS
        A2, B2 = random_hpd(SampleConfig(4, 1)), random_hpd(SampleConfig(4, 2))
        for sid in ("THM21_LOWER", "THM21_UPPER", "REM22", "COR27_I"):
            stmt = get_statement(sid)
            for p in stmt.grid():
                v = check_operator_instance(stmt, A2, B2, p).verdict
                assert v is not Verdict.VIOLATED

    def test_grid_matches_single(self):
        A, B = random_ordered_pair(SampleConfig(4, 3))
        inst = OperatorInstance(A, B)
        stmt = get_statement("COR27_I")
        grid = stmt.grid()
        batch = check_operator_grid(stmt, inst, grid)
        for p, res in zip(grid, batch):
            single = check_operator_instance(stmt, A, B, p)
            assert res.verdict is single.verdict
            if res.margin is not None:
                assert abs(res.margin - single.margin) <= 1e-12 * res.scale

    def test_witness_is_unit_eigenvector(self):
        A, B = random_hpd(SampleConfig(3, 5)), random_hpd(SampleConfig(3, 6))
        res = check_operator_instance("PROP11_I", A, B, {"r": 1.5}, force=True)
        v = res.witness
        assert abs(np.linalg.norm(v) - 1) < 1e-12


class TestKubo:
    def test_gm_below_am(self):
        rep = kubo_ando_consistency("gm", "am", 0.5, 0.5, trials=50)
        assert rep.scalar_dominance and rep.operator_violations == 0 and not rep.fatal

    def test_hm_below_gm(self):
        rep = kubo_ando_consistency("hm", "gm", 0.5, 0.5, trials=50)
        assert rep.scalar_dominance and rep.operator_violations == 0

    def test_gm_weights_not_ordered(self):
        rep = kubo_ando_consistency("gm", "gm", 0.3, 0.5, trials=20)
        assert not rep.scalar_dominance
        assert rep.scalar_witness < 1
        # the 1x1 embedding of the scalar witness is an operator witness
        assert rep.operator_witness is not None and rep.operator_witness["dim"] == 1
        assert not rep.fatal

    def test_to_dict(self):
        d = kubo_ando_consistency("gm", "gm", 0.3, 0.5, trials=2).to_dict()
        assert d["scalar_dominance"] is False and d["operator_witness"]["A"]["dim"] == 1

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            kubo_ando_consistency("gm", "am", 0.5, 0.5, t_grid=[])
