"""Counter-example scans and randomized certification of catalog statements."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from .catalog import (
    CheckResult,
    OperatorInstance,
    Order,
    Verdict,
    check_operator_grid,
    check_operator_instance,
    get_statement,
)
from .hermit import DEFAULT_TOL, HermitianMatrix, matrix_to_dict
from .sampling import (
    SampleConfig,
    derive_seed,
    log_grid,
    random_independent_pair,
    random_ordered_pair,
)
from .scalarfn import gap_expr

DEFAULT_T_GRID = (1e-4, 1e4, 2001)


def default_t_grid() -> np.ndarray:
    return log_grid(*DEFAULT_T_GRID)


# -- scalar gap region -----------------------------------------------------------


@dataclass(frozen=True)
class ScalarWitness:
    t: float
    value: float


@dataclass
class GapFinding:
    """Extremal signed values of :func:`gap_expr` for one ``r``.

    ``positive`` violates the ``r <= 1`` direction, ``negative`` the
    ``r >= 2`` direction.
    """

    r: float
    positive: Optional[ScalarWitness]
    negative: Optional[ScalarWitness]
    probes: List[ScalarWitness] = field(default_factory=list)

    @property
    def both_signs(self) -> bool:
        return self.positive is not None and self.negative is not None

    def to_dict(self) -> dict:
        def w(x):
            return None if x is None else {"t": x.t, "value": x.value}

        return {
            "r": self.r, "positive": w(self.positive), "negative": w(self.negative),
            "both_signs": self.both_signs, "probes": [w(p) for p in self.probes],
        }


def scan_gap_scalar(
    r_grid: Sequence[float],
    t_grid: Optional[Sequence[float]] = None,
    *,
    tol: float = 1e-12,
    probes: Sequence[float] = (),
) -> List[GapFinding]:
    """Scan ``gap_expr(r, t)`` for sign changes.

    A value counts as positive (negative) when it exceeds ``tol * max(1, t)``
    in absolute value; this keeps round-off near ``t = 1`` from producing
    spurious witnesses.  ``probes`` are extra ``t`` values whose gap values
    are reported verbatim in each finding.
    """
    t = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    r_grid = list(r_grid)
    if t.size == 0 or not r_grid:
        raise ValueError("r_grid and t_grid must be non-empty")
    thresh = tol * np.maximum(1.0, t)
    findings = []
    for r in r_grid:
        g = np.atleast_1d(gap_expr(r, t))
        pos = neg = None
        if np.any(g > thresh):
            i = int(np.argmax(g))
            pos = ScalarWitness(float(t[i]), float(g[i]))
        if np.any(g < -thresh):
            i = int(np.argmin(g))
            neg = ScalarWitness(float(t[i]), float(g[i]))
        probe_vals = [ScalarWitness(float(p), float(gap_expr(r, p))) for p in probes]
        findings.append(GapFinding(float(r), pos, neg, probe_vals))
    return findings


# -- operator instances ------------------------------------------------------------


@dataclass
class OperatorWitness:
    statement_id: str
    params: Dict[str, float]
    A: HermitianMatrix
    B: HermitianMatrix
    margin: float
    scale: float
    vector: np.ndarray
    forced: bool = False
    trial: Optional[int] = None
    trial_seed: Optional[int] = None

    @property
    def dim(self) -> int:
        return self.A.dim

    def to_dict(self) -> dict:
        return {
            "statement": self.statement_id, "params": dict(self.params), "dim": self.dim,
            "margin": self.margin, "scale": self.scale, "forced": self.forced,
            "trial": self.trial, "trial_seed": self.trial_seed,
            "A": matrix_to_dict(self.A, include_imag=True),
            "B": matrix_to_dict(self.B, include_imag=True),
            "vector": {"real": np.real(self.vector).tolist(), "imag": np.imag(self.vector).tolist()},
        }


def _witness(res: CheckResult, inst: OperatorInstance, trial=None, seed=None) -> OperatorWitness:
    return OperatorWitness(
        res.statement_id, dict(res.params), inst.A, inst.B, res.margin, res.scale,
        res.witness, res.forced, trial, seed,
    )


def _trial_instances(stmt, i: int, dim: int, seed: int, family: str, cache=None):
    """Lazily built pairs for trial ``i``; all derived from one trial seed."""
    trial_seed = derive_seed(seed, i)
    cfg = SampleConfig(dim, trial_seed)
    cache = {} if cache is None else cache

    def get(kind):
        if kind not in cache:
            if kind == "free":
                cache[kind] = OperatorInstance(*random_independent_pair(cfg))
            else:
                A, B = random_ordered_pair(cfg)
                cache[kind] = OperatorInstance(A, B) if kind == "ordered" else OperatorInstance(B, A)
        return cache[kind]

    def for_params(params):
        if family != "auto":
            return get(family)
        branch = stmt.branch_for(params)
        if branch is None or branch.order is None:
            return get("free")
        return get("ordered" if branch.order is Order.A_LE_B else "reversed")

    return trial_seed, for_params


def _grouped(grid, instance_for):
    """Yield ``(instance, indices)`` with the grid points that share a pair."""
    groups = {}
    for j, params in enumerate(grid):
        inst = instance_for(params)
        groups.setdefault(id(inst), (inst, []))[1].append(j)
    return groups.values()


_FAMILIES = ("auto", "free", "ordered", "reversed")


def _check_family(family):
    if family not in _FAMILIES:
        raise ValueError(f"family must be one of {_FAMILIES}, got {family!r}")


def find_operator_counterexample(
    stmt_id,
    param_grid: Sequence[Mapping[str, float]],
    trials: int = 100,
    dims: Iterable[int] = range(1, 9),
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    *,
    force: bool = False,
    t_probe: Optional[Sequence[float]] = None,
    family: str = "auto",
    refine: bool = False,
) -> Optional[OperatorWitness]:
    """First operator instance violating ``stmt_id``, or None.

    The 1x1 pairs ``([1], [t])`` for ``t`` in ``t_probe`` are tried first
    (they embed the scalar inequality), then ``trials`` random pairs.  With
    ``force=True`` the statement's hypothesis is ignored, so a witness is an
    observation about the inequality outside its stated regime.  ``refine``
    rescans two decades around a 1x1 witness and returns the worst point.
    """
    stmt = get_statement(stmt_id)
    _check_family(family)
    grid = [dict(p) for p in param_grid]
    if not grid:
        raise ValueError("param_grid must be non-empty")
    probes = log_grid(1e-4, 1e4, 17) if t_probe is None else np.asarray(t_probe, dtype=float)
    dims = list(dims)

    for t in probes:
        inst = OperatorInstance([[1.0]], [[float(t)]])
        for res in check_operator_grid(stmt, inst, grid, tol, force=force):
            if res.verdict is Verdict.VIOLATED:
                w = _witness(res, inst)
                return _refine(stmt, w, tol, force) if refine else w

    for i in range(int(trials)):
        dim = dims[i % len(dims)]
        trial_seed, instance_for = _trial_instances(stmt, i, dim, seed, family)
        found = []
        for inst, idx in _grouped(grid, instance_for):
            results = check_operator_grid(stmt, inst, [grid[j] for j in idx], tol, force=force)
            found += [(j, res, inst) for j, res in zip(idx, results) if res.verdict is Verdict.VIOLATED]
        if found:
            _, res, inst = min(found, key=lambda x: x[0])
            return _witness(res, inst, i, trial_seed)
    return None


def _refine(stmt, w: OperatorWitness, tol, force) -> OperatorWitness:
    t0 = float(np.real(w.B.array[0, 0]))
    best = w
    for t in log_grid(t0 / 10.0, t0 * 10.0, 201):
        inst = OperatorInstance([[1.0]], [[float(t)]])
        res = check_operator_instance(stmt, inst, None, w.params, tol, force=force)
        if res.verdict is Verdict.VIOLATED and res.scaled_margin < best.margin / best.scale:
            best = _witness(res, inst)
    return best


@dataclass
class CertificationReport:
    statement_id: str
    param_grid: List[Dict[str, float]]
    trials: int
    dims: List[int]
    seed: int
    tol: float
    family: str
    counts: Dict[str, int] = field(
        default_factory=lambda: {v.value: 0 for v in Verdict}
    )
    min_margin: Optional[float] = None
    min_scaled_margin: Optional[float] = None
    witnesses: List[OperatorWitness] = field(default_factory=list)

    @property
    def violated(self) -> int:
        return self.counts[Verdict.VIOLATED.value]

    @property
    def holds(self) -> int:
        return self.counts[Verdict.HOLDS.value]

    @property
    def not_applicable(self) -> int:
        return self.counts[Verdict.NOT_APPLICABLE.value]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_dict(self) -> dict:
        return {
            "id": self.statement_id,
            "params": self.param_grid,
            "trials": self.trials,
            "dims": self.dims,
            "seed": self.seed,
            "tol": self.tol,
            "family": self.family,
            "counts": dict(self.counts),
            "min_margin": self.min_margin,
            "min_scaled_margin": self.min_scaled_margin,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }


def certify_statement(
    stmt_id,
    param_grid: Optional[Sequence[Mapping[str, float]]] = None,
    trials: int = 100,
    dims: Iterable[int] = range(1, 9),
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    *,
    family: str = "auto",
    max_witnesses: int = 5,
) -> CertificationReport:
    """Check ``stmt_id`` on ``trials`` random pairs at every grid point.

    Trial ``i`` has dimension ``dims[i % len(dims)]`` and seed
    ``derive_seed(seed, i)``, so each trial is reproducible on its own.  The
    pair family is chosen per grid point with ``family="auto"``: an ordered
    pair oriented to the matching branch for statements with an ordering
    hypothesis, independent pairs otherwise.  ``param_grid=None`` uses the
    statement's default grid.
    """
    return certify_many(
        [(stmt_id, param_grid)], trials, dims, seed, tol,
        family=family, max_witnesses=max_witnesses,
    )[0]


def certify_many(
    jobs: Sequence[tuple],
    trials: int = 100,
    dims: Iterable[int] = range(1, 9),
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    *,
    family: str = "auto",
    max_witnesses: int = 5,
) -> List[CertificationReport]:
    """:func:`certify_statement` for several ``(stmt_id, param_grid)`` jobs.

    Every job sees the same pairs as it would in its own run; the pairs and
    their cached means are shared between jobs within a trial.
    """
    _check_family(family)
    dims = list(dims)
    if trials and not dims:
        raise ValueError("dims must be non-empty")
    plans = []
    for stmt_id, param_grid in jobs:
        stmt = get_statement(stmt_id)
        grid = stmt.grid() if param_grid is None else [dict(p) for p in param_grid]
        for p in grid:
            stmt.validate_params(p)
        report = CertificationReport(stmt.id, grid, int(trials), dims, int(seed), tol, family)
        plans.append((stmt, grid, report))

    for i in range(int(trials)):
        dim = dims[i % len(dims)]
        shared = {}
        for stmt, grid, report in plans:
            trial_seed, instance_for = _trial_instances(stmt, i, dim, seed, family, shared)
            results = [None] * len(grid)
            for inst, idx in _grouped(grid, instance_for):
                checked = check_operator_grid(stmt, inst, [grid[j] for j in idx], tol)
                for j, res in zip(idx, checked):
                    results[j] = (res, inst)
            for res, inst in results:
                report.counts[res.verdict.value] += 1
                if res.verdict is Verdict.NOT_APPLICABLE:
                    continue
                if report.min_margin is None or res.margin < report.min_margin:
                    report.min_margin = res.margin
                if report.min_scaled_margin is None or res.scaled_margin < report.min_scaled_margin:
                    report.min_scaled_margin = res.scaled_margin
                if res.verdict is Verdict.VIOLATED and len(report.witnesses) < max_witnesses:
                    report.witnesses.append(_witness(res, inst, i, trial_seed))
    return [report for _, _, report in plans]
