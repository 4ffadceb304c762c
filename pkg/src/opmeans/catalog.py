"""Machine-checkable catalog of the AM/GM/HM inequalities.

Each :class:`InequalityStatement` is ``lhs <= rhs`` between two small
expression trees over the operands ``A`` and ``B``.  A statement is checked
either at a scalar instance (``A := 1``, ``B := t``, means replaced by their
representing functions) or at an operator instance (a pair of positive
definite matrices), where the margin is ``lambda_min(rhs - lhs)``.

Applicability is a disjunction of :class:`Branch` objects, each a set of
parameter ranges plus an optional Loewner ordering of the operands.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, UnknownStatementError
from .hermit import (
    DEFAULT_TOL,
    LoewnerVerdict,
    compose_stack,
    eigh,
    eigh_stack,
    herm_stack,
    loewner_compare,
)
from .means import MeanKind, PairMeans, check_weight, representing_function
from .sampling import SampleConfig, derive_seed, log_grid, random_independent_pair

# -- expressions ------------------------------------------------------------------


class Expr:
    """Node of a mean expression; supports ``+``, ``-`` and scalar ``*``."""

    def __add__(self, other):
        return Sum(self, other)

    def __sub__(self, other):
        return Sum(self, Scale(-1.0, other))

    def __rmul__(self, coef):
        return Scale(coef, self)

    def __mul__(self, coef):
        return Scale(coef, self)


@dataclass(frozen=True)
class Coef:
    """Coefficient that depends on the statement parameters."""

    label: str
    fn: Callable[[Mapping[str, float]], float] = field(compare=False)
    params: Tuple[str, ...] = ()

    def __call__(self, params):
        return float(self.fn(params))

    def __str__(self):
        return self.label


@dataclass(frozen=True, eq=False)
class OperandA(Expr):
    def __str__(self):
        return "A"


@dataclass(frozen=True, eq=False)
class OperandB(Expr):
    def __str__(self):
        return "B"


@dataclass(frozen=True, eq=False)
class Identity(Expr):
    def __str__(self):
        return "I"


@dataclass(frozen=True, eq=False)
class Scale(Expr):
    coef: Union[float, Coef]
    expr: Expr

    def __str__(self):
        inner = f"({self.expr})" if isinstance(self.expr, (Sum, Mean)) else str(self.expr)
        if isinstance(self.coef, (int, float)) and float(self.coef) == -1.0:
            return f"-{inner}"
        return f"({self.coef})*{inner}"


@dataclass(frozen=True, eq=False)
class Sum(Expr):
    left: Expr
    right: Expr

    def __str__(self):
        right = str(self.right)
        if right.startswith("-"):
            return f"{self.left} - {right[1:]}"
        return f"{self.left} + {right}"


@dataclass(frozen=True, eq=False)
class Inverse(Expr):
    expr: Expr

    def __str__(self):
        return f"({self.expr})^-1"


_SYMBOL = {MeanKind.ARITHMETIC: "!", MeanKind.GEOMETRIC: "#", MeanKind.HARMONIC: "!^"}


@dataclass(frozen=True, eq=False)
class Mean(Expr):
    kind: MeanKind
    nu: Union[float, str]
    left: Expr
    right: Expr

    def __str__(self):
        nu = "1/2" if self.nu == 0.5 else self.nu
        return f"{self.left} {_SYMBOL[self.kind]}_{nu} {self.right}"


def expr_params(expr: Expr) -> set:
    """Names of all parameters referenced by ``expr``."""
    if isinstance(expr, Scale):
        own = set(expr.coef.params) if isinstance(expr.coef, Coef) else set()
        return own | expr_params(expr.expr)
    if isinstance(expr, Sum):
        return expr_params(expr.left) | expr_params(expr.right)
    if isinstance(expr, Inverse):
        return expr_params(expr.expr)
    if isinstance(expr, Mean):
        own = {expr.nu} if isinstance(expr.nu, str) else set()
        return own | expr_params(expr.left) | expr_params(expr.right)
    return set()


def _coef(c, params) -> float:
    return c(params) if isinstance(c, Coef) else float(c)


def _nu(slot, params) -> float:
    return float(params[slot]) if isinstance(slot, str) else float(slot)


def eval_scalar(expr: Expr, params: Mapping[str, float], a: float, b: float) -> float:
    """Evaluate ``expr`` with ``A := a`` and ``B := b`` (positive scalars)."""
    if isinstance(expr, OperandA):
        return a
    if isinstance(expr, OperandB):
        return b
    if isinstance(expr, Identity):
        return 1.0
    if isinstance(expr, Scale):
        return _coef(expr.coef, params) * eval_scalar(expr.expr, params, a, b)
    if isinstance(expr, Sum):
        return eval_scalar(expr.left, params, a, b) + eval_scalar(expr.right, params, a, b)
    if isinstance(expr, Inverse):
        return 1.0 / eval_scalar(expr.expr, params, a, b)
    if isinstance(expr, Mean):
        x = eval_scalar(expr.left, params, a, b)
        y = eval_scalar(expr.right, params, a, b)
        if x == 1.0:
            return representing_function(expr.kind, _nu(expr.nu, params), y)
        return x * representing_function(expr.kind, _nu(expr.nu, params), y / x)
    raise TypeError(f"not an expression node: {expr!r}")


def eval_operator(expr: Expr, params: Mapping[str, np.ndarray], pair: PairMeans) -> np.ndarray:
    """Evaluate ``expr`` on the matrices held by ``pair`` for ``k`` parameter sets.

    ``params`` maps each parameter name to an array of shape ``(k,)``; the
    result is a Hermitian ``(k, n, n)`` array.
    """
    k = len(next(iter(params.values()))) if params else 1
    n = pair.dim
    if isinstance(expr, OperandA):
        return np.broadcast_to(pair.A.array, (k, n, n))
    if isinstance(expr, OperandB):
        return np.broadcast_to(pair.B.array, (k, n, n))
    if isinstance(expr, Identity):
        return np.broadcast_to(np.eye(n, dtype=complex), (k, n, n))
    if isinstance(expr, Scale):
        c = np.broadcast_to(np.asarray(_coef_values(expr.coef, params), dtype=float), (k,))
        return herm_stack(c[:, None, None] * eval_operator(expr.expr, params, pair))
    if isinstance(expr, Sum):
        return herm_stack(eval_operator(expr.left, params, pair) + eval_operator(expr.right, params, pair))
    if isinstance(expr, Inverse):
        w, V = eigh_stack(eval_operator(expr.expr, params, pair))
        if np.any(w[:, 0] <= 0):
            bad = float(np.min(w[:, 0]))
            raise DomainError(f"cannot invert: eigenvalue {bad!r}", bad)
        return compose_stack(V, 1.0 / w)
    if isinstance(expr, Mean):
        nus = np.broadcast_to(np.asarray(_nu_values(expr.nu, params), dtype=float), (k,))
        if isinstance(expr.left, OperandA) and isinstance(expr.right, OperandB):
            return pair.mean_stack(expr.kind, nus)
        X = eval_operator(expr.left, params, pair)
        Y = eval_operator(expr.right, params, pair)
        return np.stack([PairMeans(X[j], Y[j]).mean(expr.kind, nus[j]).array for j in range(k)])
    raise TypeError(f"not an expression node: {expr!r}")


def _coef_values(c, params):
    return c.fn(params) if isinstance(c, Coef) else float(c)


def _nu_values(slot, params):
    return params[slot] if isinstance(slot, str) else float(slot)


# -- statements ------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = True
    hi_closed: bool = True

    def __contains__(self, x) -> bool:
        x = float(x)
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below

    def __str__(self):
        left = "[" if self.lo_closed and math.isfinite(self.lo) else "("
        right = "]" if self.hi_closed and math.isfinite(self.hi) else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


REALS = Interval()
UNIT = Interval(0.0, 1.0)


class Order(enum.Enum):
    A_LE_B = "A<=B"
    B_LE_A = "B<=A"


@dataclass(frozen=True)
class Branch:
    """One alternative of a statement's hypothesis."""

    ranges: Tuple[Tuple[str, Interval], ...] = ()
    order: Optional[Order] = None

    def params_ok(self, params: Mapping[str, float]) -> bool:
        return all(params[name] in iv for name, iv in self.ranges)

    def __str__(self):
        parts = [f"{name} in {iv}" for name, iv in self.ranges]
        if self.order is not None:
            parts.append(f"0 < {self.order.value}")
        return " and ".join(parts) or "always"


class Verdict(enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class InequalityStatement:
    """``lhs <= rhs`` whenever one of ``branches`` is satisfied."""

    id: str
    description: str
    params: Tuple[Tuple[str, Interval], ...]
    branches: Tuple[Branch, ...]
    lhs: Expr
    rhs: Expr
    default_grid: Tuple[Tuple[Tuple[str, float], ...], ...] = ()
    note: str = ""

    def __post_init__(self):
        declared = {name for name, _ in self.params}
        used = expr_params(self.lhs) | expr_params(self.rhs)
        for b in self.branches:
            used |= {name for name, _ in b.ranges}
        if not used <= declared:
            raise ValueError(f"{self.id}: undeclared parameters {sorted(used - declared)}")

    @property
    def param_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.params)

    @property
    def has_order_condition(self) -> bool:
        return any(b.order is not None for b in self.branches)

    def grid(self):
        return [dict(p) for p in self.default_grid]

    def condition_text(self) -> str:
        return " or ".join(f"({b})" for b in self.branches)

    def validate_params(self, params: Mapping[str, float]) -> Dict[str, float]:
        out = {}
        for name, iv in self.params:
            if name not in params or params[name] is None:
                raise ValueError(f"{self.id} needs parameter {name!r}")
            value = float(params[name])
            if value not in iv:
                raise DomainError(f"{self.id}: {name}={value!r} outside {iv}", value)
            out[name] = value
        return out

    def branch_for(self, params: Mapping[str, float]) -> Optional[Branch]:
        """First branch whose parameter ranges contain ``params``."""
        for b in self.branches:
            if b.params_ok(params):
                return b
        return None

    def __str__(self):
        return f"{self.id}: {self.lhs} <= {self.rhs} if {self.condition_text()}"


def _grid(**axes) -> tuple:
    names = list(axes)
    return tuple(tuple(zip(names, combo)) for combo in product(*(axes[n] for n in names)))


NU16 = tuple(i / 16 for i in range(17))
NU_LOW = tuple(v for v in NU16 if v <= 0.5)
NU_HIGH = tuple(v for v in NU16 if v >= 0.5)
NU_INNER = NU16[1:-1]

_A, _B, _I = OperandA(), OperandB(), Identity()


def _am(nu):
    return Mean(MeanKind.ARITHMETIC, nu, _A, _B)


def _gm(nu):
    return Mean(MeanKind.GEOMETRIC, nu, _A, _B)


def _hm(nu):
    return Mean(MeanKind.HARMONIC, nu, _A, _B)


_R = Coef("r", lambda p: p["r"], ("r",))
_ONE_MINUS_R = Coef("1 - r", lambda p: 1.0 - p["r"], ("r",))
_NU_MINUS_HALF = Coef("nu - 1/2", lambda p: p["nu"] - 0.5, ("nu",))


def _r_combination(nu):
    return _R * _gm(nu) + _ONE_MINUS_R * _am(nu)


_NU = ("nu", UNIT)
_RP = ("r", REALS)
_R_GE_2 = ("r", Interval(2.0, math.inf))
_R_LE_1 = ("r", Interval(-math.inf, 1.0))
_LOW_BRANCH_NU = ("nu", Interval(0.0, 0.5))
_HIGH_BRANCH_NU = ("nu", Interval(0.5, 1.0))


def _build_catalog() -> Tuple[InequalityStatement, ...]:
    return (
        InequalityStatement(
            "YOUNG_AM_GM",
            "weighted geometric mean is below the weighted arithmetic mean",
            (_NU,),
            (Branch(),),
            _gm("nu"),
            _am("nu"),
            _grid(nu=NU16),
        ),
        InequalityStatement(
            "YOUNG_GM_HM",
            "weighted harmonic mean is below the weighted geometric mean",
            (_NU,),
            (Branch(),),
            _hm("nu"),
            _gm("nu"),
            _grid(nu=NU16),
        ),
        InequalityStatement(
            "PROP11_I",
            "r A#B + (1-r)(A+B)/2 <= harmonic mean, for r >= 2",
            (_RP,),
            (Branch((_R_GE_2,)),),
            _r_combination(0.5),
            _hm(0.5),
            _grid(r=(2.0, 2.5, 5.0, 10.0)),
        ),
        InequalityStatement(
            "PROP11_II",
            "r A#B + (1-r)(A+B)/2 >= harmonic mean, for r <= 1",
            (_RP,),
            (Branch((_R_LE_1,)),),
            _hm(0.5),
            _r_combination(0.5),
            _grid(r=(-1.0, 0.0, 0.5, 1.0)),
        ),
        InequalityStatement(
            "THM21_LOWER",
            "A#B + (nu - 1/2)(B - A) <= A#_nu B",
            (_NU,),
            (Branch((_LOW_BRANCH_NU,), Order.A_LE_B), Branch((_HIGH_BRANCH_NU,), Order.B_LE_A)),
            _gm(0.5) + _NU_MINUS_HALF * (_B - _A),
            _gm("nu"),
            _grid(nu=NU16),
        ),
        InequalityStatement(
            "THM21_UPPER",
            "A#_nu B <= average of the weighted arithmetic and harmonic means",
            (_NU,),
            (Branch((_LOW_BRANCH_NU,), Order.A_LE_B), Branch((_HIGH_BRANCH_NU,), Order.B_LE_A)),
            _gm("nu"),
            0.5 * _am("nu") + 0.5 * _hm("nu"),
            _grid(nu=NU16),
        ),
        InequalityStatement(
            "REM22",
            "A#_nu B <= A#B on the regimes of THM21",
            (_NU,),
            (Branch((_LOW_BRANCH_NU,), Order.A_LE_B), Branch((_HIGH_BRANCH_NU,), Order.B_LE_A)),
            _gm("nu"),
            _gm(0.5),
            _grid(nu=NU16),
        ),
        InequalityStatement(
            "LEM25",
            "k_{r,nu} <= harmonic mean for r >= 2 (scalar lemma, t >= 1 or t <= 1 by branch)",
            (_RP, _NU),
            (
                Branch((_R_GE_2, _LOW_BRANCH_NU), Order.A_LE_B),
                Branch((_R_GE_2, _HIGH_BRANCH_NU), Order.B_LE_A),
            ),
            _r_combination("nu"),
            _hm("nu"),
            _grid(r=(2.0, 3.0, 10.0), nu=NU16),
        ),
        InequalityStatement(
            "LEM26",
            "k_{r,nu} >= harmonic mean for r <= 1, 0 < nu <= 1, all t > 0",
            (_RP, _NU),
            (Branch((_R_LE_1, ("nu", Interval(0.0, 1.0, lo_closed=False)))),),
            _hm("nu"),
            _r_combination("nu"),
            _grid(r=(1.0, 0.0, -2.0), nu=NU16[1:]),
        ),
        InequalityStatement(
            "COR27_I",
            "r A#_nu B + (1-r) weighted arithmetic mean <= weighted harmonic mean, r >= 2",
            (_RP, _NU),
            (
                Branch((_R_GE_2, ("nu", Interval(0.0, 0.5, lo_closed=False))), Order.A_LE_B),
                Branch((_R_GE_2, _HIGH_BRANCH_NU), Order.B_LE_A),
            ),
            _r_combination("nu"),
            _hm("nu"),
            _grid(r=(2.0, 3.0, 10.0), nu=NU16[1:]),
            note="first branch is 0 < nu <= 1/2 as printed, unlike the closed range of THM21",
        ),
        InequalityStatement(
            "COR27_II",
            "r A#_nu B + (1-r) weighted arithmetic mean >= weighted harmonic mean, r <= 1",
            (_RP, _NU),
            (Branch((_R_LE_1, ("nu", Interval(0.0, 1.0, False, False)))),),
            _hm("nu"),
            _r_combination("nu"),
            _grid(r=(1.0, 0.0, -2.0), nu=NU_INNER),
            note="printed hypothesis also says 't > 0'; read as: every positive definite pair",
        ),
    )


CATALOG: Tuple[InequalityStatement, ...] = _build_catalog()
_BY_ID = {s.id: s for s in CATALOG}


def list_statements() -> Tuple[InequalityStatement, ...]:
    return CATALOG


def get_statement(stmt) -> InequalityStatement:
    if isinstance(stmt, InequalityStatement):
        return stmt
    try:
        return _BY_ID[str(stmt)]
    except KeyError:
        raise UnknownStatementError(
            f"unknown statement {stmt!r}; known: {', '.join(_BY_ID)}"
        ) from None


# -- checks ------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarParams:
    t: float
    nu: Optional[float] = None
    r: Optional[float] = None

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError(f"t must be positive, got {self.t!r}", self.t)
        if self.nu is not None:
            check_weight(self.nu)

    def as_dict(self) -> Dict[str, float]:
        return {k: v for k, v in (("nu", self.nu), ("r", self.r)) if v is not None}


@dataclass
class CheckResult:
    """Outcome of one statement at one instance.

    ``margin`` is ``rhs - lhs`` for scalar checks and ``lambda_min(rhs - lhs)``
    for operator checks; it is None when the instance is not applicable and
    was not forced.  ``witness`` is the scalar ``t`` or a unit eigenvector
    for the smallest eigenvalue of ``rhs - lhs``.
    """

    statement_id: str
    params: Dict[str, float]
    condition_met: bool
    applicable: bool
    verdict: Verdict
    margin: Optional[float] = None
    scale: float = 1.0
    witness: object = None
    forced: bool = False
    lhs: Optional[float] = None
    rhs: Optional[float] = None

    @property
    def scaled_margin(self) -> Optional[float]:
        return None if self.margin is None else self.margin / self.scale


def _decide(margin, scale, tol) -> Verdict:
    return Verdict.HOLDS if margin >= -tol * scale else Verdict.VIOLATED


def check_scalar_instance(stmt, params, tol: float = DEFAULT_TOL, *, force: bool = False) -> CheckResult:
    """Check ``stmt`` with ``A := 1`` and ``B := t``.

    ``params`` is a :class:`ScalarParams` or a mapping with ``t`` and the
    statement's parameters.  Ordering hypotheses become ``t >= 1`` (for
    ``A <= B``) and ``t <= 1`` (for ``B <= A``).
    """
    stmt = get_statement(stmt)
    if not isinstance(params, ScalarParams):
        params = ScalarParams(**dict(params))
    values = stmt.validate_params(params.as_dict())
    t = float(params.t)
    met = any(
        b.params_ok(values)
        and (b.order is None or (t >= 1.0 if b.order is Order.A_LE_B else t <= 1.0))
        for b in stmt.branches
    )
    applicable = met or force
    if not applicable:
        return CheckResult(stmt.id, values, False, False, Verdict.NOT_APPLICABLE, witness=t)
    lhs = eval_scalar(stmt.lhs, values, 1.0, t)
    rhs = eval_scalar(stmt.rhs, values, 1.0, t)
    margin = rhs - lhs
    scale = max(1.0, abs(lhs), abs(rhs))
    return CheckResult(
        stmt.id, values, met, True, _decide(margin, scale, tol),
        margin=margin, scale=scale, witness=t, forced=force and not met, lhs=lhs, rhs=rhs,
    )


class OperatorInstance:
    """A positive definite pair with cached means and Loewner comparison."""

    def __init__(self, A, B):
        self.pair = A if isinstance(A, PairMeans) and B is None else PairMeans(A, B)
        self._order: Dict[float, LoewnerVerdict] = {}

    @property
    def A(self):
        return self.pair.A

    @property
    def B(self):
        return self.pair.B

    def order(self, tol) -> LoewnerVerdict:
        v = self._order.get(tol)
        if v is None:
            v = self._order[tol] = loewner_compare(self.pair.A, self.pair.B, tol)
        return v


def _condition_met(stmt: InequalityStatement, inst: OperatorInstance, values, tol) -> bool:
    for b in stmt.branches:
        if not b.params_ok(values):
            continue
        if b.order is None:
            return True
        if b.order is Order.A_LE_B and inst.order(tol).is_le:
            return True
        if b.order is Order.B_LE_A and inst.order(tol).is_ge:
            return True
    return False


def _spectral_norms(X: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(X)
    return np.maximum(np.abs(w[:, 0]), np.abs(w[:, -1]))


def check_operator_grid(
    stmt, inst: "OperatorInstance", grid: Sequence[Mapping[str, float]],
    tol: float = DEFAULT_TOL, *, force: bool = False,
) -> list:
    """:func:`check_operator_instance` at every parameter set in ``grid``.

    All applicable parameter sets are evaluated together as one stack of
    matrices; results come back in grid order.
    """
    stmt = get_statement(stmt)
    if not isinstance(inst, OperatorInstance):
        raise TypeError("inst must be an OperatorInstance")
    results: list = [None] * len(grid)
    todo = []
    for j, params in enumerate(grid):
        values = stmt.validate_params(params)
        met = _condition_met(stmt, inst, values, tol)
        if met or force:
            todo.append((j, values, met))
        else:
            results[j] = CheckResult(stmt.id, values, False, False, Verdict.NOT_APPLICABLE)
    if todo:
        stacked = {
            name: np.array([values[name] for _, values, _ in todo]) for name in stmt.param_names
        }
        lhs = eval_operator(stmt.lhs, stacked, inst.pair)
        rhs = eval_operator(stmt.rhs, stacked, inst.pair)
        k = len(todo)
        lhs = np.broadcast_to(lhs, (k,) + lhs.shape[1:])
        rhs = np.broadcast_to(rhs, (k,) + rhs.shape[1:])
        w, V = eigh_stack(herm_stack(rhs - lhs))
        scales = np.maximum(1.0, np.maximum(_spectral_norms(lhs), _spectral_norms(rhs)))
        for i, (j, values, met) in enumerate(todo):
            margin, scale = float(w[i, 0]), float(scales[i])
            results[j] = CheckResult(
                stmt.id, values, met, True, _decide(margin, scale, tol),
                margin=margin, scale=scale, witness=np.array(V[i, :, 0]),
                forced=force and not met,
            )
    return results


def check_operator_instance(
    stmt, A, B=None, params: Optional[Mapping[str, float]] = None,
    tol: float = DEFAULT_TOL, *, force: bool = False,
) -> CheckResult:
    """Check ``stmt`` at the positive definite pair ``(A, B)``.

    ``A`` may also be an :class:`OperatorInstance` (with ``B=None``) to reuse
    cached spectral data across statements and parameters.  The margin is
    ``lambda_min(rhs - lhs)`` and the verdict is ``violated`` when it falls
    below ``-tol * max(1, |lhs|_2, |rhs|_2)``.  Ordering hypotheses are
    decided by :func:`loewner_compare` with the same ``tol``.  ``force``
    evaluates the inequality even when the hypothesis fails.
    """
    inst = A if isinstance(A, OperatorInstance) else OperatorInstance(A, B)
    return check_operator_grid(stmt, inst, [params or {}], tol, force=force)[0]


# -- representing-function consistency ---------------------------------------------


@dataclass
class KuboAndoReport:
    """Scalar dominance ``f_m <= f_n`` against operator order ``A m B <= A n B``.

    ``fatal`` flags an inconsistency: dominance on the grid together with an
    operator pair violating the order.
    """

    m_kind: MeanKind
    n_kind: MeanKind
    nu_m: float
    nu_n: float
    grid_size: int
    scalar_dominance: bool
    scalar_min_gap: float
    scalar_witness: Optional[float]
    trials: int
    operator_violations: int
    min_margin: Optional[float]
    operator_witness: Optional[dict] = None

    @property
    def fatal(self) -> bool:
        return self.scalar_dominance and self.operator_violations > 0

    def to_dict(self) -> dict:
        from .hermit import matrix_to_dict

        w = None
        if self.operator_witness is not None:
            w = dict(self.operator_witness)
            w["A"] = matrix_to_dict(w["A"])
            w["B"] = matrix_to_dict(w["B"])
            w["vector"] = {"real": np.real(w["vector"]).tolist(), "imag": np.imag(w["vector"]).tolist()}
        return {
            "m": self.m_kind.value, "n": self.n_kind.value, "nu_m": self.nu_m, "nu_n": self.nu_n,
            "grid_size": self.grid_size, "scalar_dominance": self.scalar_dominance,
            "scalar_min_gap": self.scalar_min_gap, "scalar_witness": self.scalar_witness,
            "trials": self.trials, "operator_violations": self.operator_violations,
            "min_margin": self.min_margin, "fatal": self.fatal, "operator_witness": w,
        }


def _order_margin(pair: PairMeans, m_kind, nu_m, n_kind, nu_n):
    M = pair.mean(m_kind, nu_m)
    N = pair.mean(n_kind, nu_n)
    d = eigh(N - M)
    scale = max(1.0, M.norm2(), N.norm2())
    return d.lambda_min, scale, np.array(d.eigenvectors[:, 0])


def kubo_ando_consistency(
    m_kind, n_kind, nu_m, nu_n,
    t_grid: Optional[Sequence[float]] = None,
    trials: int = 100,
    dims: Iterable[int] = range(1, 9),
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> KuboAndoReport:
    """Test that ``f_m <= f_n`` on ``t_grid`` implies ``A m B <= A n B``.

    With scalar dominance every sampled pair must satisfy the operator order.
    Without it, the worst grid point is recorded, the 1x1 pair ``([1], [t])``
    at that point is checked, and random pairs are searched for a witness of
    dimension >= 1.
    """
    m_kind, n_kind = MeanKind.parse(m_kind), MeanKind.parse(n_kind)
    nu_m, nu_n = check_weight(nu_m), check_weight(nu_n)
    grid = log_grid(1e-4, 1e4, 2001) if t_grid is None else np.asarray(t_grid, dtype=float)
    dims = list(dims)
    if grid.size == 0 or not dims:
        raise ValueError("t_grid and dims must be non-empty")
    fm = np.atleast_1d(representing_function(m_kind, nu_m, grid))
    fn = np.atleast_1d(representing_function(n_kind, nu_n, grid))
    gap = fn - fm
    scaled = gap / np.maximum(1.0, np.maximum(np.abs(fm), np.abs(fn)))
    worst = int(np.argmin(scaled))
    dominance = bool(scaled[worst] >= -tol)
    report = KuboAndoReport(
        m_kind, n_kind, nu_m, nu_n, int(grid.size), dominance, float(gap[worst]),
        None if dominance else float(grid[worst]), int(trials), 0, None,
    )

    def consider(pair, margin, scale, vec, trial):
        if report.min_margin is None or margin < report.min_margin:
            report.min_margin = margin
        if margin < -tol * scale:
            report.operator_violations += 1
            if report.operator_witness is None:
                report.operator_witness = {
                    "trial": trial, "dim": pair.dim, "A": pair.A, "B": pair.B,
                    "margin": margin, "vector": vec,
                }

    if not dominance:
        pair = PairMeans([[1.0]], [[float(grid[worst])]])
        consider(pair, *_order_margin(pair, m_kind, nu_m, n_kind, nu_n), trial=None)
    for i in range(int(trials)):
        dim = dims[i % len(dims)]
        A, B = random_independent_pair(SampleConfig(dim, derive_seed(seed, i)))
        pair = PairMeans(A, B)
        consider(pair, *_order_margin(pair, m_kind, nu_m, n_kind, nu_n), trial=i)
    return report
