"""Command-line front end: ``verify``, ``eval``, ``curve`` and ``gap-search``.

Exit codes: 0 success, 1 a catalog statement was violated on its stated
regime (``verify`` only), 2 invalid input or configuration.
"""
from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from . import scalarfn
from .catalog import Verdict, check_scalar_instance, get_statement, kubo_ando_consistency
from .errors import OpMeansError
from .hermit import DEFAULT_TOL, load_matrix, matrix_to_dict
from .means import MeanKind, mean
from .sampling import SampleConfig, log_grid, rng_for
from .search import DEFAULT_T_GRID, certify_many, scan_gap_scalar

LEMMA_TOL = 1e-12
K_R_GRID = tuple(np.linspace(-5.0, 5.0, 11))
NU64_LOW = tuple(i / 64 for i in range(33))
NU64_HIGH = tuple(i / 64 for i in range(32, 65))

OPERATOR_SUITES = {
    "young": ("YOUNG_AM_GM", "YOUNG_GM_HM"),
    "prop11": ("PROP11_I", "PROP11_II"),
    "thm21": ("THM21_LOWER", "THM21_UPPER"),
    "rem22": ("REM22",),
    "cor27": ("COR27_I", "COR27_II"),
}
SUITES = ("all", "young", "prop11", "thm21", "lemmas", "rem22", "cor27", "kubo")

KUBO_CASES = (
    ("gm", "am", 0.25, 0.25), ("gm", "am", 0.5, 0.5), ("gm", "am", 0.75, 0.75),
    ("hm", "gm", 0.25, 0.25), ("hm", "gm", 0.5, 0.5), ("hm", "gm", 0.75, 0.75),
    ("hm", "am", 0.5, 0.5),
    # expected to fail scalar dominance on t < 1; reported as an observation
    ("gm", "gm", 0.3, 0.5),
)


class UsageError(Exception):
    pass


def _parse_dims(text: str) -> List[int]:
    dims: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = (int(x) for x in part.split("-", 1))
            dims.extend(range(lo, hi + 1))
        elif part:
            dims.append(int(part))
    if not dims or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"invalid dims {text!r}")
    return dims


def _counts(holds=0, violated=0, na=0):
    return {Verdict.HOLDS.value: holds, Verdict.VIOLATED.value: violated,
            Verdict.NOT_APPLICABLE.value: na}


# -- verify ----------------------------------------------------------------------------


def _lemma_entries(trials: int, seed: int) -> List[dict]:
    entries = []
    regimes = (
        (NU64_LOW, log_grid(1.0, 1e4, 2001)),
        (NU64_HIGH, log_grid(1e-4, 1.0, 2001)),
    )
    for name, fn in (("LEMMA_F", scalarfn.lemma_f), ("LEMMA_G", scalarfn.lemma_g),
                     ("LEMMA_H", scalarfn.lemma_h)):
        holds = bad = 0
        worst = None
        witnesses = []
        if trials:
            for nus, grid in regimes:
                for nu in nus:
                    v = fn(nu, grid)
                    ok = v >= -LEMMA_TOL
                    holds += int(ok.sum())
                    bad += int((~ok).sum())
                    i = int(np.argmin(v))
                    if worst is None or v[i] < worst:
                        worst = float(v[i])
                    if not ok.all() and len(witnesses) < 5:
                        j = int(np.argmin(ok))
                        witnesses.append({"nu": nu, "t": float(grid[j]), "value": float(v[j])})
        entries.append({
            "id": name, "kind": "scalar-grid",
            "params": {"nu_low": list(NU64_LOW), "nu_high": list(NU64_HIGH), "grid_points": 2001},
            "counts": _counts(holds, bad), "min_margin": worst, "witnesses": witnesses,
        })

    t_grid = log_grid(*DEFAULT_T_GRID)
    for sid in ("LEM25", "LEM26"):
        stmt = get_statement(sid)
        counts = _counts()
        worst = None
        witnesses = []
        if trials:
            for params in stmt.grid():
                for t in t_grid:
                    res = check_scalar_instance(stmt, dict(params, t=float(t)), LEMMA_TOL)
                    counts[res.verdict.value] += 1
                    if res.verdict is Verdict.NOT_APPLICABLE:
                        continue
                    if worst is None or res.margin < worst:
                        worst = res.margin
                    if res.verdict is Verdict.VIOLATED and len(witnesses) < 5:
                        witnesses.append({"params": params, "t": float(t), "margin": res.margin})
        entries.append({
            "id": sid, "kind": "scalar", "params": stmt.grid(), "counts": counts,
            "min_margin": worst, "witnesses": witnesses,
        })

    # k_{r,nu}(t) must be non-increasing along the r grid
    rng = rng_for(seed)
    holds = bad = 0
    worst = None
    witnesses = []
    if trials:
        nus = rng.uniform(0.0, 1.0, size=trials)
        ts = np.exp(rng.uniform(np.log(1e-4), np.log(1e4), size=trials))
        for nu, t in zip(nus, ts):
            k = np.array([scalarfn.k_fn(r, nu, t) for r in K_R_GRID])
            steps = k[:-1] - k[1:]
            ok = steps >= -LEMMA_TOL
            holds += int(ok.sum())
            bad += int((~ok).sum())
            d = float(steps.min())
            worst = d if worst is None else min(worst, d)
            if not ok.all() and len(witnesses) < 5:
                witnesses.append({"nu": float(nu), "t": float(t), "step": d})
    entries.append({
        "id": "K_MONOTONE", "kind": "scalar-sample", "params": {"r_grid": list(K_R_GRID)},
        "counts": _counts(holds, bad), "min_margin": worst, "witnesses": witnesses,
    })
    return entries


def _kubo_entries(trials, dims, seed, tol) -> List[dict]:
    entries = []
    for m, n, nu_m, nu_n in KUBO_CASES:
        if trials:
            rep = kubo_ando_consistency(m, n, nu_m, nu_n, None, trials, dims, seed, tol)
            body = rep.to_dict()
            violated = rep.operator_violations if rep.fatal else 0
            counts = _counts(rep.trials - violated if rep.scalar_dominance else 0, violated,
                             0 if rep.scalar_dominance else rep.trials)
            min_margin = rep.min_margin
        else:
            body, counts, min_margin = None, _counts(), None
        entries.append({
            "id": f"KUBO_{m}{nu_m:g}_LE_{n}{nu_n:g}", "kind": "kubo",
            "params": {"m": m, "n": n, "nu_m": nu_m, "nu_n": nu_n},
            "counts": counts, "min_margin": min_margin,
            "witnesses": [] if body is None or body["operator_witness"] is None else [body["operator_witness"]],
            "report": body,
        })
    return entries


def run_verify(suite: str, trials: int, dims: Sequence[int], seed: int, tol: float,
               fmt: str = "json", timestamp: bool = True):
    """Run a verification suite; returns ``(exit_code, report_dict)``."""
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if trials < 0:
        raise UsageError("trials must be >= 0")
    if not tol > 0:
        raise UsageError("tol must be positive")
    names = [s for s in SUITES[1:] if suite in ("all", s)]
    statements = []
    op_ids = [sid for s in names for sid in OPERATOR_SUITES.get(s, ())]
    if op_ids:
        reports = certify_many([(sid, None) for sid in op_ids], trials, dims, seed, tol)
        for rep in reports:
            row = rep.to_dict()
            row["kind"] = "operator"
            statements.append(row)
    if "lemmas" in names:
        statements.extend(_lemma_entries(trials, seed))
    if "kubo" in names:
        statements.extend(_kubo_entries(trials, dims, seed, tol))
    defaults = SampleConfig(1)
    report = {
        "command": "verify",
        "config": {
            "suite": suite, "trials": trials, "dims": list(dims), "seed": seed, "tol": tol,
            "format": fmt, "lemma_tol": LEMMA_TOL,
            "eigenvalue_range": list(defaults.eigenvalue_range), "cond_cap": defaults.cond_cap,
            "t_grid": list(DEFAULT_T_GRID),
        },
        "statements": statements,
        "tool_version": __version__,
    }
    if timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    violated = sum(row["counts"][Verdict.VIOLATED.value] for row in statements)
    return (1 if violated else 0), report


def _verify_text(report) -> str:
    lines = [f"verify suite={report['config']['suite']} trials={report['config']['trials']} "
             f"seed={report['config']['seed']}"]
    for row in report["statements"]:
        c = row["counts"]
        mm = row.get("min_margin")
        mm = "n/a" if mm is None else f"{mm:.3e}"
        status = "FAIL" if c[Verdict.VIOLATED.value] else "ok"
        lines.append(
            f"  {status:4} {row['id']:<24} holds={c['holds']:<8} violated={c['violated']:<5} "
            f"n/a={c['not-applicable']:<6} min_margin={mm}"
        )
    return "\n".join(lines)


# -- eval / curve / gap-search -----------------------------------------------------------


def format_matrix_text(M) -> str:
    arr = np.asarray(M.array)
    rows = []
    for row in arr:
        cells = []
        for z in row:
            cells.append(f"{z.real: .9e}" if z.imag == 0 else f"{z.real: .9e}{z.imag:+.9e}j")
        rows.append("  ".join(cells))
    return "\n".join(rows)


def run_eval(op: str, nu: float, file_a: str, file_b: str, fmt: str = "json") -> str:
    kind = MeanKind.parse(op)
    A, B = load_matrix(file_a), load_matrix(file_b)
    M = mean(kind, A, B, nu)
    if fmt == "text":
        return format_matrix_text(M)
    return json.dumps(matrix_to_dict(M))


CURVE_FUNCTIONS = {
    "gap_expr": (("r",), lambda p, t: scalarfn.gap_expr(p["r"], t)),
    "lemma_f": (("nu",), lambda p, t: scalarfn.lemma_f(p["nu"], t)),
    "lemma_g": (("nu",), lambda p, t: scalarfn.lemma_g(p["nu"], t)),
    "lemma_h": (("nu",), lambda p, t: scalarfn.lemma_h(p["nu"], t)),
    "k_fn": (("r", "nu"), lambda p, t: scalarfn.k_fn(p["r"], p["nu"], t)),
}


def run_curve(fn: str, params: dict, t_lo: float, t_hi: float, n: int) -> str:
    """CSV text with header ``t,value`` and 17 significant digits."""
    if fn not in CURVE_FUNCTIONS:
        raise UsageError(f"unknown function {fn!r}; choose from {', '.join(CURVE_FUNCTIONS)}")
    needed, f = CURVE_FUNCTIONS[fn]
    missing = [k for k in needed if params.get(k) is None]
    if missing:
        raise UsageError(f"{fn} needs --{' --'.join(missing)}")
    grid = log_grid(t_lo, t_hi, n)
    values = np.atleast_1d(f(params, grid))
    lines = ["t,value"]
    lines += [f"{format(float(t), '.17g')},{format(float(v), '.17g')}" for t, v in zip(grid, values)]
    return "\n".join(lines) + "\n"


def run_gap_search(r_lo, r_hi, r_steps, t_lo, t_hi, t_steps, probes=(), fmt="json"):
    if r_steps < 1 or r_hi < r_lo or (r_steps == 1 and r_hi != r_lo):
        raise UsageError("need r_lo <= r_hi and r_steps >= 1 (r_steps = 1 requires r_lo = r_hi)")
    r_grid = np.linspace(r_lo, r_hi, r_steps) if r_steps > 1 else np.array([r_lo])
    t_grid = log_grid(t_lo, t_hi, t_steps)
    findings = scan_gap_scalar(r_grid, t_grid, probes=probes)
    report = {
        "command": "gap-search",
        "config": {"r_lo": r_lo, "r_hi": r_hi, "r_steps": r_steps, "t_lo": t_lo, "t_hi": t_hi,
                   "t_steps": t_steps, "probes": list(probes), "format": fmt},
        "findings": [f.to_dict() for f in findings],
        "tool_version": __version__,
    }
    if fmt == "text":
        lines = []
        for f in findings:
            pos = "none" if f.positive is None else f"t={f.positive.t:.6g} value={f.positive.value:+.6f}"
            neg = "none" if f.negative is None else f"t={f.negative.t:.6g} value={f.negative.value:+.6f}"
            lines.append(f"r={f.r:.6g}  positive: {pos}  negative: {neg}")
            for p in f.probes:
                lines.append(f"    probe t={p.t:.6g} value={p.value:+.6f}")
        return "\n".join(lines)
    return json.dumps(report, indent=2)


# -- argument parsing --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opmeans", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)}")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--dims", type=_parse_dims, default=list(range(1, 9)), help="e.g. 1-8 or 2,4")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.add_argument("--out", help="write the report here instead of stdout")
    v.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")

    e = sub.add_parser("eval", help="evaluate a weighted mean of two matrix files")
    e.add_argument("--op", required=True, help="am, gm or hm")
    e.add_argument("--nu", type=float, required=True)
    e.add_argument("--file-a", "--a", dest="file_a", required=True)
    e.add_argument("--file-b", "--b", dest="file_b", required=True)
    e.add_argument("--format", choices=("json", "text"), default="json")

    c = sub.add_parser("curve", help="tabulate a scalar function as CSV")
    c.add_argument("--fn", required=True, help=", ".join(CURVE_FUNCTIONS))
    c.add_argument("--r", type=float)
    c.add_argument("--nu", type=float)
    c.add_argument("--t-lo", type=float, default=DEFAULT_T_GRID[0])
    c.add_argument("--t-hi", type=float, default=DEFAULT_T_GRID[1])
    c.add_argument("--n", type=int, default=DEFAULT_T_GRID[2])
    c.add_argument("--out", "--out-path", dest="out", default="-", help="output path, '-' for stdout")

    g = sub.add_parser("gap-search", help="find both-sign values of gap_expr for 1 < r < 2")
    g.add_argument("--r-lo", type=float, default=1.1)
    g.add_argument("--r-hi", type=float, default=1.9)
    g.add_argument("--r-steps", type=int, default=9)
    g.add_argument("--t-lo", type=float, default=DEFAULT_T_GRID[0])
    g.add_argument("--t-hi", type=float, default=DEFAULT_T_GRID[1])
    g.add_argument("--t-steps", type=int, default=DEFAULT_T_GRID[2])
    g.add_argument("--probe", type=float, action="append", default=[],
                   help="also report gap_expr at this t (repeatable)")
    g.add_argument("--format", choices=("json", "text"), default="json")
    return parser


def _emit(text: str, out: Optional[str]):
    if out in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            code, report = run_verify(args.suite, args.trials, args.dims, args.seed, args.tol,
                                      args.format, timestamp=not args.no_timestamp)
            text = json.dumps(report, indent=2) if args.format == "json" else _verify_text(report)
            _emit(text, args.out)
            return code
        if args.command == "eval":
            _emit(run_eval(args.op, args.nu, args.file_a, args.file_b, args.format), None)
            return 0
        if args.command == "curve":
            text = run_curve(args.fn, {"r": args.r, "nu": args.nu}, args.t_lo, args.t_hi, args.n)
            _emit(text, args.out)
            return 0
        if args.command == "gap-search":
            _emit(run_gap_search(args.r_lo, args.r_hi, args.r_steps, args.t_lo, args.t_hi,
                                 args.t_steps, args.probe, args.format), None)
            return 0
    except (UsageError, OpMeansError, ValueError, OSError) as exc:
        print(f"opmeans {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
