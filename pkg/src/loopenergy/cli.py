"""Command-line front end.

Exit codes: 0 success, 1 verification violations, 2 usage or parse errors,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds as B
from .errors import GraphError, NoConvergence, OrderTooLarge, ParseError
from .extremal import classify
from .graph import FamilyTag, graph_from_code, make_family
from .graphfile import format_graph, one_liner, read_graph, report_json
from .spectral import eigenvalues
from .verify import MAX_DEDUP_ORDER, MAX_ORDER, find_extremal, verify_all

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def fmt(x: float | None) -> str:
    if x is None:
        return "UNDEFINED"
    s = f"{x:.12f}"
    return f"{0:.12f}" if float(s) == 0 else s


def _load(path: str):
    try:
        return read_graph(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def cmd_energy(args) -> int:
    g = _load(args.file)
    rep = B.bound_report(g)
    print(f"n {g.n} m {g.m} sigma {g.sigma}")
    print("spectrum " + " ".join(fmt(x) for x in rep.spectrum))
    print(f"energy {fmt(rep.energy)}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    g = _load(args.file)
    spec = eigenvalues(g)
    rep = B.bound_report(g, tol=args.tol, spec=spec)
    fams = classify(g, spec, tol=args.tol)
    if args.json:
        print(json.dumps(report_json(rep, fams), indent=2))
        return EXIT_OK
    flags = rep.equality_flags
    rows = [
        ("gutman", rep.gutman_upper, None),
        ("improved", rep.improved_upper, rep.improved_radicand),
        ("lambda1_lower", rep.lambda1_lower, None),
        ("lambda1_upper", rep.lambda1_upper, None),
        ("pair_product", rep.pair_product_rhs, None),
        ("spectral_lower", rep.spectral_lower, rep.spectral_radicand),
        ("ozeki", rep.ozeki_lower, rep.ozeki_radicand),
        ("spread_ratio", rep.spread_ratio_lower, None),
    ]
    print(f"n {g.n} m {g.m} sigma {g.sigma}")
    print("spectrum " + " ".join(fmt(x) for x in rep.spectrum))
    print(f"energy {fmt(rep.energy)}")
    print(f"lambda1 {fmt(rep.lambda1)}")
    print(f"pair_product_lhs {fmt(rep.pair_product_lhs)}")
    for name, value, radicand in rows:
        line = f"{name:<15} {fmt(value):>18}"
        if radicand is not None:
            line += f"  radicand {fmt(radicand)}"
        if flags.get(name):
            line += "  equal"
        print(line)
    print(f"gutman_family {fams.gutman_family or '-'}")
    print(f"equal_shift_family {fams.equal_shift_family or '-'}")
    print(f"lambda1_family_sigma {'-' if fams.lambda1_family is None else fams.lambda1_family}")
    cond = fams.spread_ratio_condition
    print(f"spread_ratio_condition {'UNDEFINED' if cond is None else cond}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if not 1 <= args.max_n <= MAX_ORDER:
        raise UsageError(f"--max-n must lie in [1, {MAX_ORDER}], got {args.max_n}")
    if args.dedup and args.max_n > MAX_DEDUP_ORDER:
        raise UsageError(f"--dedup supports --max-n <= {MAX_DEDUP_ORDER}")
    if args.tol <= 0 or args.jobs < 1:
        raise UsageError("--tol must be positive and --jobs at least 1")
    summary = verify_all(args.max_n, tol=args.tol, dedup=args.dedup, jobs=args.jobs)
    payload = json.dumps(summary.to_json(), indent=2)
    if args.report:
        Path(args.report).write_text(payload + "\n", encoding="utf-8")
        counts = summary.mismatch_counts()
        print(f"graphs checked {summary.graphs_checked}")
        print(f"violations {len(summary.violations)}")
        for check, by_dir in counts.items():
            print(f"mismatches {check} " + " ".join(f"{k}={v}" for k, v in by_dir.items()))
        print(f"max trace residual {summary.max_trace_residual:.3e}")
        print(f"elapsed {summary.elapsed:.2f}s")
    else:
        print(payload)
    return EXIT_OK if summary.ok else EXIT_VIOLATIONS


def cmd_family(args) -> int:
    try:
        tag = FamilyTag.parse(args.tag)
        g = make_family(tag, args.n, args.sigma)
    except (ValueError, GraphError) as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(format_graph(g))
    return EXIT_OK


def cmd_extremal(args) -> int:
    if args.bound not in B.BOUND_IDS:
        raise UsageError(f"unknown bound {args.bound!r}; choose from {', '.join(B.BOUND_IDS)}")
    if not 1 <= args.n <= MAX_DEDUP_ORDER:
        raise UsageError(f"--n must lie in [1, {MAX_DEDUP_ORDER}]")
    rows = find_extremal(args.n, args.sigma, args.bound, args.top)
    print(f"{'rank':>4} {'gap':>18} {'energy':>18} {'bound':>18}  code  graph")
    for k, row in enumerate(rows, start=1):
        print(f"{k:>4} {fmt(row.gap):>18} {fmt(row.energy):>18} {fmt(row.bound):>18}  "
              f"{row.code}  {one_liner(graph_from_code(row.code))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loopenergy", description="Energy bounds for graphs with self-loops.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("energy", help="print spectrum and energy of a graph file")
    p.add_argument("file")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("bounds", help="evaluate every bound for a graph file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    p.add_argument("--tol", type=float, default=B.DEFAULT_EQ_TOL)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="exhaustively check all graphs up to --max-n")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--tol", type=float, default=B.DEFAULT_EQ_TOL)
    p.add_argument("--dedup", action="store_true", help="one graph per isomorphism class")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--report", help="write the JSON summary here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("family", help="print a named family as a graph file")
    p.add_argument("tag", help="family name, e.g. half_k2_hat")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=int, help="loop count for ksigma_hat_union_isolated")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("extremal", help="rank isomorphism classes by bound gap")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=int)
    p.add_argument("--bound", required=True)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_extremal)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OrderTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoConvergence as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
