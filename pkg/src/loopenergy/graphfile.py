"""Plain-text graph files and JSON bound reports.

A graph file looks like::

    # K2 with a loop on one end
    n 2
    e 0 1
    l 0

``n`` comes first and exactly once; ``e u v`` adds an edge, ``l u`` a loop.
"""

from __future__ import annotations

from pathlib import Path

from .bounds import BoundReport
from .errors import GraphError, ParseError
from .extremal import EqualityClassification
from .graph import SelfLoopGraph, from_edge_list

REPORT_DIGITS = 12


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", lineno) from None


def parse_graph(text: str) -> SelfLoopGraph:
    n = None
    edges: list[tuple[int, int]] = []
    loops: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        head, args = tokens[0], tokens[1:]
        if n is None and head != "n":
            raise ParseError(f"first directive must be 'n <order>', got {head!r}", lineno)
        if head == "n":
            if n is not None:
                raise ParseError("'n' given more than once", lineno)
            if len(args) != 1:
                raise ParseError("'n' takes exactly one integer", lineno)
            n = _int(args[0], lineno)
            if n < 1:
                raise ParseError(f"order must be >= 1, got {n}", lineno)
        elif head == "e":
            if len(args) != 2:
                raise ParseError("'e' takes exactly two vertices", lineno)
            edges.append((_int(args[0], lineno), _int(args[1], lineno)))
        elif head == "l":
            if len(args) != 1:
                raise ParseError("'l' takes exactly one vertex", lineno)
            loops.append(_int(args[0], lineno))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
        # validate what we have so far so errors point at the offending line
        if head != "n":
            try:
                from_edge_list(n, edges, loops)
            except GraphError as exc:
                raise ParseError(str(exc), lineno) from None
    if n is None:
        raise ParseError("missing 'n <order>' line", max(1, len(text.splitlines())))
    return from_edge_list(n, edges, loops)


def read_graph(path: str | Path) -> SelfLoopGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def format_graph(g: SelfLoopGraph) -> str:
    lines = [f"n {g.n}"]
    lines += [f"e {u} {v}" for u, v in g.sorted_edges()]
    lines += [f"l {v}" for v in sorted(g.loops)]
    return "\n".join(lines) + "\n"


def one_liner(g: SelfLoopGraph) -> str:
    return "; ".join(format_graph(g).strip().splitlines())


def round_sig(x: float | None, digits: int = REPORT_DIGITS) -> float | None:
    if x is None:
        return None
    r = float(f"{x:.{digits}g}")
    return 0.0 if r == 0 else r


def report_json(report: BoundReport, families: EqualityClassification) -> dict:
    """ReportFile layout with every real rounded to 12 significant digits."""
    r = round_sig
    return {
        "n": report.n,
        "m": report.m,
        "sigma": report.sigma,
        "spectrum": [r(x) for x in report.spectrum],
        "energy": r(report.energy),
        "bounds": {
            "gutman_upper": r(report.gutman_upper),
            "improved_upper": r(report.improved_upper),
            "improved_radicand": r(report.improved_radicand),
            "lambda1": r(report.lambda1),
            "lambda1_lower": r(report.lambda1_lower),
            "lambda1_upper": r(report.lambda1_upper),
            "pair_product_lhs": r(report.pair_product_lhs),
            "pair_product_rhs": r(report.pair_product_rhs),
            "spectral_lower": r(report.spectral_lower),
            "spectral_radicand": r(report.spectral_radicand),
            "ozeki_lower": r(report.ozeki_lower),
            "ozeki_radicand": r(report.ozeki_radicand),
            "spread_ratio_lower": r(report.spread_ratio_lower),
        },
        "equality_flags": dict(report.equality_flags),
        "families": {
            "gutman_family": families.gutman_family.tag.name if families.gutman_family else None,
            "equal_shift_family": (
                families.equal_shift_family.tag.name if families.equal_shift_family else None
            ),
            "lambda1_family_sigma": families.lambda1_family,
            "spread_ratio_condition": families.spread_ratio_condition,
        },
    }
