"""Command-line interface: ``srlnc <command> [flags]``.

Exit codes: 0 success, 1 oracle mismatch, 2 usage error, 3 budget exceeded,
4 degenerate input (pole or coincident partial-fraction values).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import analysis as an
from .codec import SimConfig, run_trials
from .errors import BudgetExceededError, CoincidentValuesError, PoleError
from .field import gf
from .linalg import DEFAULT_ENUM_BUDGET
from .oracle import ORACLE_BUDGET, format_census, oracle_full_rank_poly

EXIT_MISMATCH, EXIT_USAGE, EXIT_BUDGET, EXIT_DEGENERATE = 1, 2, 3, 4

VALUE_COLUMNS = ("q", "n", "m", "i_or_r", "p0", "value", "formula")
SWEEP_COLUMNS = ("q", "n", "m", "p0", "exact", "exact_float", "bkw_lower_bound", "rlnc")


class UsageError(Exception):
    pass


def parse_p0(text: str) -> Fraction:
    """Exact rational from "7/10" or "0.7" (decimals are taken literally)."""
    try:
        p = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse p0 {text!r}") from exc
    if not 0 <= p <= 1:
        raise UsageError(f"p0 must lie in [0, 1], got {p}")
    return p


def parse_grid(text: str) -> list[Fraction]:
    return [parse_p0(t) for t in text.split(",") if t.strip()]


def parse_range(text: str) -> list[int]:
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse range {text!r}") from exc


def _csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _field(args):
    try:
        return gf(args.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required for {args.command}")


def _point_or_symbolic(args):
    if args.symbolic and args.p0 is not None:
        raise UsageError("--symbolic and --p0 are mutually exclusive")
    if not args.symbolic and args.p0 is None:
        raise UsageError("give --symbolic or --p0")
    if args.symbolic and args.format == "csv":
        raise UsageError("csv output needs --p0")
    return None if args.symbolic else parse_p0(args.p0)


# commands -------------------------------------------------------------------


def cmd_exact(args) -> str:
    _need(args, "n", "m")
    spec = _field(args)
    if args.m < args.n:
        raise UsageError("need m >= n")
    p0 = _point_or_symbolic(args)
    kw = dict(budget=args.budget, workers=args.threads)
    if p0 is None:
        expr = an.full_rank_prob(args.m, args.n, spec, **kw)
        payload = {"q": args.q, "n": args.n, "m": args.m, "formula": expr.meta.value,
                   "text": str(expr), "expr": expr.expr.to_json()}
        if args.format == "json":
            return _dumps(payload)
        return f"{expr}\n{json.dumps(expr.expr.to_json())}\n"
    value = an.full_rank_value(args.m, args.n, spec, p0, **kw)
    return _render_value(args, args.m, args.n, p0, value, "eq3")


def _render_value(args, m, index, p0, value, tag, extra=None) -> str:
    row = {"q": args.q, "n": args.n, "m": "" if m is None else m, "i_or_r": index,
           "p0": str(p0), "value": str(value), "formula": tag}
    if args.format == "csv":
        return _csv([row], VALUE_COLUMNS)
    if args.format == "json":
        out = dict(row, float=float(value))
        out.update(extra or {})
        return _dumps(out)
    lines = [f"exact: {value}", f"float: {float(value)!r}"]
    for k, v in (extra or {}).items():
        lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def cmd_pni(args) -> str:
    _need(args, "n", "i")
    spec = _field(args)
    if not 0 <= args.i <= args.n - 1:
        raise UsageError("need 0 <= i <= n-1")
    p0 = _point_or_symbolic(args)
    expr = an.p_in(args.i, args.n, spec, budget=args.budget, workers=args.threads)
    bound = an.bkw_bound(args.i, args.n, spec)
    if p0 is None:
        if args.format == "json":
            return _dumps({"q": args.q, "n": args.n, "i": args.i, "formula": expr.meta.value,
                           "text": str(expr), "expr": expr.expr.to_json()})
        out = f"{expr}\n{json.dumps(expr.expr.to_json())}\n"
        if args.bound:
            out += f"bkw_bound: max(p0, (1-p0)/{args.q - 1})^{args.n - args.i}\n"
        return out
    value = expr.evaluate(p0)
    extra = {}
    if args.bound:
        b = bound.evaluate(p0)
        extra = {"bkw_bound": str(b), "bkw_bound_float": float(b)}
    if args.format == "csv" and args.bound:
        rows = [
            {"q": args.q, "n": args.n, "m": "", "i_or_r": args.i, "p0": str(p0), "value": str(value), "formula": "eq2"},
            {"q": args.q, "n": args.n, "m": "", "i_or_r": args.i, "p0": str(p0), "value": str(bound.evaluate(p0)), "formula": "bkw"},
        ]
        return _csv(rows, VALUE_COLUMNS)
    return _render_value(args, None, args.i, p0, value, "eq2", extra)


def cmd_rankdist(args) -> str:
    _need(args, "n", "m", "p0")
    spec = _field(args)
    if args.m < args.n:
        raise UsageError("need m >= n")
    p0 = parse_p0(args.p0)
    kw = dict(budget=args.budget, workers=args.threads)
    if args.form == "pf":
        dist = an.rank_dist_partial_fraction(args.m, args.n, spec, p0, **kw)
    else:
        dist = an.rank_dist_nested(args.m, args.n, spec, p0, **kw)
    vals = dist.values()
    total = sum(vals, Fraction(0))
    tag = dist.form.value
    if args.format == "csv":
        rows = [{"q": args.q, "n": args.n, "m": args.m, "i_or_r": r, "p0": str(p0), "value": str(v), "formula": tag}
                for r, v in enumerate(vals)]
        return _csv(rows, VALUE_COLUMNS)
    if args.format == "json":
        return _dumps({"q": args.q, "n": args.n, "m": args.m, "p0": str(p0), "form": tag,
                       "probs": [str(v) for v in vals], "sum": str(total)})
    width = max(len(str(v)) for v in vals)
    lines = [f"rank  {'exact':<{width}}  float"]
    lines += [f"{r:<4}  {str(v):<{width}}  {float(v)!r}" for r, v in enumerate(vals)]
    lines.append(f"sum   {total}")
    return "\n".join(lines) + "\n"


def cmd_sweep(args) -> str:
    _need(args, "n")
    spec = _field(args)
    ms = parse_range(args.m_range) if args.m_range else ([args.m] if args.m is not None else None)
    if not ms:
        raise UsageError("give --m-range (e.g. 3:5) or --m")
    if any(m < args.n for m in ms):
        raise UsageError("every m must be >= n")
    grid = parse_grid(args.p0_grid) if args.p0_grid else ([parse_p0(args.p0)] if args.p0 else None)
    if not grid:
        raise UsageError("give --p0-grid (e.g. 1/4,1/2,3/4) or --p0")
    rows = []
    for m in ms:
        expr = an.full_rank_prob(m, args.n, spec, budget=args.budget, workers=args.threads)
        for p in grid:
            v = expr.evaluate(p)
            rows.append({
                "q": args.q, "n": args.n, "m": m, "p0": str(p), "exact": str(v),
                "exact_float": repr(float(v)),
                "bkw_lower_bound": str(an.bkw_full_rank_lower_bound(m, args.n, spec, p)),
                "rlnc": str(an.rlnc_full_rank(m, args.n, args.q)),
            })
    if args.format == "json":
        return _dumps(rows)
    if args.format == "table":
        lines = ["  ".join(SWEEP_COLUMNS)]
        lines += ["  ".join(str(r[c]) for c in SWEEP_COLUMNS) for r in rows]
        return "\n".join(lines) + "\n"
    return _csv(rows, SWEEP_COLUMNS)


def _sim_config(args) -> SimConfig:
    if args.config:
        try:
            return SimConfig.load(args.config)
        except (OSError, ValueError, TypeError) as exc:
            raise UsageError(f"bad config {args.config}: {exc}") from exc
    _need(args, "n", "p0")
    d = dict(q=args.q, n=args.n, p0=parse_p0(args.p0), L=args.L, mode=args.mode,
             trials=args.trials, seed=args.seed, include_zero_vectors=not args.no_zero_vectors)
    if args.mode == "fixed-m":
        d["m"] = args.m
    else:
        d["m"], d["N"], d["eps"] = None, args.N, parse_p0(args.eps)
    try:
        return SimConfig(**d)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_simulate(args) -> str:
    cfg = _sim_config(args)
    report = run_trials(cfg, workers=args.threads)
    comparison = None
    if cfg.mode == "fixed-m" and cfg.include_zero_vectors:
        try:
            exact = an.full_rank_value(cfg.m, cfg.n, gf(cfg.q), cfg.p0, budget=args.budget)
        except BudgetExceededError:
            exact = None
        if exact is not None:
            sd = math.sqrt(float(exact) * (1 - float(exact)) / cfg.trials) if cfg.trials else 0.0
            z = (report.empirical_success_rate - float(exact)) / sd if sd > 0 else None
            comparison = {"exact": str(exact), "exact_float": float(exact), "z": z}
    if args.format == "csv":
        return report.to_csv()
    out = {"report": report.to_dict(), "comparison": comparison}
    if args.format == "json":
        return _dumps(out)
    r = report
    lines = [f"trials: {r.trials}", f"successes: {r.successes}",
             f"success_rate: {r.empirical_success_rate!r}", f"stderr: {r.stderr!r}"]
    if r.transmissions_mean is not None:
        lines.append(f"transmissions_mean: {r.transmissions_mean!r}")
        lines.append(f"transmissions_quantiles: {json.dumps(r.transmissions_quantiles)}")
    if comparison:
        lines += [f"exact: {comparison['exact']}", f"z: {comparison['z']!r}"]
    return "\n".join(lines) + "\n"


def cmd_oracle(args) -> str:
    _need(args, "n", "m")
    spec = _field(args)
    if args.m < args.n:
        raise UsageError("need m >= n")
    budget = args.budget if args.budget_given else ORACLE_BUDGET
    opoly, census = oracle_full_rank_poly(args.m, args.n, spec, budget=budget)
    expr = an.full_rank_prob(args.m, args.n, spec, budget=args.budget, workers=args.threads).expr
    match = expr.is_polynomial() and expr.num == opoly
    args._mismatch = not match
    verdict = "MATCH" if match else "MISMATCH"
    if args.format == "json":
        return _dumps({"q": args.q, "n": args.n, "m": args.m, "census": census,
                       "oracle": {"text": str(opoly), "poly": opoly.to_json()},
                       "analysis": {"text": str(expr), "expr": expr.to_json()},
                       "verdict": verdict})
    if args.format == "csv":
        rows = [{"weight": w, "count": c} for w, c in enumerate(census)]
        return _csv(rows, ("weight", "count"))
    return (f"{format_census(census)}\n"
            f"oracle:   {opoly}\n"
            f"analysis: {expr}\n"
            f"{verdict}\n")


COMMANDS = {
    "exact": cmd_exact,
    "pni": cmd_pni,
    "rankdist": cmd_rankdist,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global")
    g.add_argument("--q", type=int, default=2, help="field order")
    g.add_argument("--n", type=int, help="generation size (columns)")
    g.add_argument("--m", type=int, help="received packets (rows)")
    g.add_argument("--i", type=int, help="dimension of the spanning set")
    g.add_argument("--p0", help='sparsity, exact ("7/10") or decimal ("0.7")')
    g.add_argument("--symbolic", action="store_true", help="print the rational function in p0")
    g.add_argument("--budget", type=int, default=None, help=f"enumeration budget (default {DEFAULT_ENUM_BUDGET})")
    g.add_argument("--threads", type=int, default=1, help="worker processes")
    g.add_argument("--out", help="write output to this file")
    g.add_argument("--format", choices=("table", "csv", "json"), default=None)
    g.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="srlnc", description="Exact and simulated decoding probabilities of sparse RLNC.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("exact", parents=[common], help="full-rank probability P(m x n)")
    pni = sub.add_parser("pni", parents=[common], help="dependency probability p(i, n)")
    pni.add_argument("--bound", action="store_true", help="also print the BKW bound")
    rd = sub.add_parser("rankdist", parents=[common], help="rank distribution at a point")
    rd.add_argument("--form", choices=("nested", "pf"), default="nested")
    sw = sub.add_parser("sweep", parents=[common], help="exact P over an m range and p0 grid")
    sw.add_argument("--m-range", help="inclusive lo:hi or comma list")
    sw.add_argument("--p0-grid", help="comma-separated p0 values")
    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo codec run")
    sim.add_argument("--config", help="JSON SimConfig file")
    sim.add_argument("--mode", choices=("fixed-m", "stream"), default="fixed-m")
    sim.add_argument("--N", type=int, help="coded packets sent (stream mode)")
    sim.add_argument("--eps", default="0", help="erasure probability (stream mode)")
    sim.add_argument("--L", type=int, default=4, help="payload symbols per packet")
    sim.add_argument("--trials", type=int, default=10_000)
    sim.add_argument("--no-zero-vectors", action="store_true", help="never transmit zero coding vectors")
    sub.add_parser("oracle", parents=[common], help="brute-force census and cross-check")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.budget_given = args.budget is not None
    if args.budget is None:
        args.budget = DEFAULT_ENUM_BUDGET
    if args.format is None:
        args.format = {"sweep": "csv", "simulate": "json"}.get(args.command, "table")
    args._mismatch = False
    try:
        text = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"srlnc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"srlnc {args.command}: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CoincidentValuesError as exc:
        print(f"srlnc {args.command}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except PoleError as exc:
        print(f"srlnc {args.command}: pole: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_MISMATCH if args._mismatch else 0


if __name__ == "__main__":
    sys.exit(main())
