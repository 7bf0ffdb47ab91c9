"""Command-line front end.

Subcommands: ``table``, ``simulate``, ``evaluate``, ``audit``, ``params``
and ``cells``.  Exit codes: 0 success, 1 validation failure, 2 audit
violation, 3 I/O or parse error.

Trace files are JSON lines: a header object with the strategy parameters,
then one object per motion segment.  Floats are written in shortest
round-trip form, so reading a trace back gives bit-identical segments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, TextIO

from . import solver
from .analysis import (
    DEFAULT_ETA,
    analytic_cr_limit,
    audit_min_growth,
    audit_odd_lower_bound,
    empirical_cr,
    extract_witness,
    grid_targets,
    worst_case_targets,
)
from .coverage import ALL, NONE, MotionSegment, Trajectory
from .errors import InsufficientHorizonError, InvalidTraceError, SearchError, TraceParseError
from .strategies import StrategyParams, Variant, build_trajectory

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_AUDIT = 2
EXIT_IO = 3

TABLE_HEADER = ("p", "parity", "cr")


# --- file formats ----------------------------------------------------------------

def trace_records(traj: Trajectory, rounds: int) -> list[dict[str, Any]]:
    if traj.params is None:
        raise ValueError("trajectory carries no strategy parameters")
    header = {"type": "header", **traj.params.to_dict(), "rounds": rounds}
    records = [header]
    for i, seg in enumerate(traj.segments):
        records.append(
            {"seq": i, "t0": seg.t_start, "t1": seg.t_end, "x0": seg.x_start, "x1": seg.x_end, "search": seg.search}
        )
    return records


def write_trace(path: str | Path, traj: Trajectory, rounds: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in trace_records(traj, rounds):
            fh.write(json.dumps(rec) + "\n")


def _parse_search(value: Any, index: int) -> int | str:
    if value in (ALL, NONE):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    raise TraceParseError(index, f"invalid search annotation {value!r}")


def parse_trace(lines: TextIO) -> tuple[dict[str, Any], Trajectory]:
    header: dict[str, Any] | None = None
    segments: list[MotionSegment] = []
    for index, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceParseError(index, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(rec, dict):
            raise TraceParseError(index, "record is not a JSON object")
        if header is None:
            if rec.get("type") != "header":
                raise TraceParseError(index, "first record must be the header")
            header = rec
            continue
        if rec.get("seq") != len(segments):
            raise TraceParseError(index, f"expected seq {len(segments)}, got {rec.get('seq')!r}")
        try:
            seg = MotionSegment(
                float(rec["t0"]), float(rec["t1"]), float(rec["x0"]), float(rec["x1"]),
                _parse_search(rec["search"], index),
            )
        except KeyError as exc:
            raise TraceParseError(index, f"missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise TraceParseError(index, str(exc)) from exc
        segments.append(seg)
    if header is None:
        raise TraceParseError(0, "empty trace")
    try:
        params = StrategyParams.from_dict(header)
        traj = Trajectory(params.p, tuple(segments), params)
    except (KeyError, TypeError, ValueError) as exc:
        raise TraceParseError(0, f"inconsistent trace: {exc}") from exc
    return header, traj


def read_trace(path: str | Path) -> tuple[dict[str, Any], Trajectory]:
    with open(path, encoding="utf-8") as fh:
        return parse_trace(fh)


def table_rows(p_max: int) -> list[tuple[int, str, str]]:
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    rows = []
    for p in range(1, p_max + 1):
        cr = solver.optimal_cr(p)
        rows.append((p, "odd" if p % 2 else "even", f"{solver.round_half_away(cr, 5)}"))
    return rows


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _json(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


# --- subcommands ------------------------------------------------------------------

def cmd_table(args: argparse.Namespace) -> int:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_HEADER)
    writer.writerows(table_rows(args.p_max))
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _params_from_args(args: argparse.Namespace) -> StrategyParams:
    p = args.p
    if args.variant is None:
        variant = (Variant.PRACTICAL_ODD if p % 2 else Variant.PRACTICAL_EVEN) if args.eps else (
            Variant.ODD if p % 2 else Variant.EVEN
        )
    else:
        variant = Variant(args.variant)
    if variant.practical:
        if args.eps is None:
            raise ValueError("practical variants need --eps")
        base = StrategyParams.optimal(p, args.eps)
        if base.variant is not variant:
            raise ValueError(f"variant {variant.value} does not accept p={p}")
        return base
    if variant.odd != (p % 2 == 1):
        raise ValueError(f"variant {variant.value} does not accept p={p}")
    opt = solver.optimal(p)
    a = opt.a if args.a is None else args.a
    if variant.odd:
        return StrategyParams(p, variant, a)
    r = opt.r if args.r is None else args.r
    return StrategyParams(p, variant, a, r)


def cmd_simulate(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    traj = build_trajectory(params, args.rounds)
    write_trace(args.out, traj, args.rounds)
    print(f"wrote {len(traj)} segments ({args.rounds} rounds) to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    header, traj = read_trace(args.trace)
    rounds = int(header["rounds"]) if args.rounds is None else args.rounds
    targets = worst_case_targets(traj.params, rounds, args.eta)
    if args.grid:
        targets += grid_targets(traj.params, rounds, args.grid)
    report = empirical_cr(traj, targets, rounds)
    _emit(_json(report.to_dict()), args.out)
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    _, traj = read_trace(args.trace)
    claimed = analytic_cr_limit(traj.params) if args.claimed_cr is None else args.claimed_cr
    witness = extract_witness(traj)
    audits = []
    if traj.p % 2:
        audits.append(audit_odd_lower_bound(witness, traj.p))
    audits.append(audit_min_growth(witness, claimed))
    result = {
        "p": traj.p,
        "claimed_cr": claimed,
        "periods": witness.horizon,
        "x": witness.x_seq,
        "t": witness.t_seq,
        "audits": [a.to_dict() for a in audits],
        "passed": all(a.passed for a in audits),
    }
    _emit(_json(result), args.out)
    for a in audits:
        if not a.passed:
            print(f"audit {a.name} violated at index {a.first_violation}", file=sys.stderr)
    return EXIT_OK if result["passed"] else EXIT_AUDIT


def params_dict(p: int, eps: float | None = None) -> dict[str, Any]:
    opt = solver.optimal(p)
    out: dict[str, Any] = {"p": p, "cr": opt.cr, "a": opt.a}
    if p % 2 == 0:
        out["r"] = opt.r
        out["bracket"] = list(opt.bracket)
    if eps is not None:
        out["eps"] = eps
        out["cr_practical"] = opt.cr + eps
        if p % 2 == 0:
            out["cells_bound"] = solver.even_cells_bound(p, eps)
        elif p >= 3:
            out["cells_bound"] = solver.odd_cells_bound(p, eps)
    return out


def cmd_params(args: argparse.Namespace) -> int:
    _emit(_json(params_dict(args.p, args.eps)), None)
    return EXIT_OK


def cmd_cells(args: argparse.Namespace) -> int:
    c = solver.optimal_cr(args.p) if args.c is None else args.c
    n = solver.compliant_cell_count(args.p, c, args.eps, abs(args.x_init), args.delta)
    _emit(_json({"p": args.p, "c": c, "eps": args.eps, "x_init": args.x_init, "delta": args.delta, "n": n}), None)
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multisearch", description="Multimodal linear search toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="optimal competitive ratio for p = 1..p_max (CSV)")
    p.add_argument("p_max", nargs="?", type=_positive_int, default=16)
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("simulate", help="build a strategy trajectory and write a trace file")
    p.add_argument("--p", type=_positive_int, required=True)
    p.add_argument("--variant", choices=[v.value for v in Variant])
    p.add_argument("--a", type=float, help="growth factor (default: optimal)")
    p.add_argument("--r", type=float, help="split coefficient, even p (default: optimal)")
    p.add_argument("--eps", type=float, help="approximation margin of the practical variants")
    p.add_argument("--rounds", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="competitive ratio of a trace at its critical targets")
    p.add_argument("trace")
    p.add_argument("--rounds", type=_positive_int, help="rounds of critical targets (default: all)")
    p.add_argument("--eta", type=float, default=DEFAULT_ETA, help="relative offset of critical targets")
    p.add_argument("--grid", type=int, default=0, help="extra uniform targets per round")
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("audit", help="check lower-bound necessary conditions on a trace")
    p.add_argument("trace")
    p.add_argument("--claimed-cr", type=float, help="ratio to audit against (default: trace's analytic ratio)")
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("params", help="optimal parameters for p modes (JSON)")
    p.add_argument("--p", type=_positive_int, required=True)
    p.add_argument("--eps", type=float)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("cells", help="cell count of one compliant sweep")
    p.add_argument("--p", type=_positive_int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--c", type=float, help="target ratio (default: optimal for p)")
    p.add_argument("--x-init", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=cmd_cells)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TraceParseError as exc:
        print(f"error: {getattr(args, 'trace', '')}: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except (InsufficientHorizonError, InvalidTraceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SearchError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
