"""Structural recognition of the graphs on which the bounds are tight.

Matching is done on the graph itself (components, edge counts, loop
placement), never on its spectrum, so the sweep can compare these answers
against numerically observed equality without going in circles.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .bounds import DEFAULT_EQ_TOL
from .errors import DegenerateSpread, NotConnected
from .graph import Family, FamilyTag, SelfLoopGraph, connected_components
from .spectral import Spectrum, eigenvalues

_EQUAL_SHIFT_TAGS = {
    FamilyTag.K1,
    FamilyTag.K1_HAT,
    FamilyTag.K2,
    FamilyTag.K2_TILDE,
    FamilyTag.K2_HAT,
}


def _complete_with_all_loops(g: SelfLoopGraph) -> bool:
    return g.m == g.n * (g.n - 1) // 2 and g.sigma == g.n


def classify_component(g: SelfLoopGraph) -> Family:
    if len(connected_components(g)) != 1:
        raise NotConnected("classify_component expects a connected graph")
    if g.n == 1:
        tag = FamilyTag.K1_HAT if g.sigma else FamilyTag.K1
        return Family(tag, 1, g.sigma)
    if g.n == 2:
        tag = (FamilyTag.K2, FamilyTag.K2_TILDE, FamilyTag.K2_HAT)[g.sigma]
        return Family(tag, 2, g.sigma)
    if _complete_with_all_loops(g):
        return Family(FamilyTag.KN_HAT, g.n, g.n)
    return Family(FamilyTag.OTHER)


def matches_gutman_equality_family(g: SelfLoopGraph) -> Family | None:
    """Which of the six graph families attaining sqrt(n(2m + sigma - sigma^2/n))
    ``g`` belongs to, if any."""
    counts = Counter(classify_component(c).tag for c in connected_components(g))
    n = g.n
    if len(counts) == 1:
        (tag,) = counts
        single = {
            FamilyTag.K1: FamilyTag.NK1,
            FamilyTag.K1_HAT: FamilyTag.NK1_HAT,
            FamilyTag.K2: FamilyTag.HALF_K2,
            FamilyTag.K2_TILDE: FamilyTag.HALF_K2_TILDE,
            FamilyTag.K2_HAT: FamilyTag.HALF_K2_HAT,
        }
        if tag in single:
            return Family(single[tag], n, g.sigma)
        return None
    if set(counts) == {FamilyTag.K1, FamilyTag.K1_HAT} and counts[FamilyTag.K1] == counts[FamilyTag.K1_HAT]:
        return Family(FamilyTag.HALF_K1_UNION_HALF_K1HAT, n, g.sigma)
    return None


def matches_equal_shift_family(g: SelfLoopGraph) -> Family | None:
    """Connected graphs whose shifted eigenvalues all share one magnitude."""
    fam = classify_component(g)
    return fam if fam.tag in _EQUAL_SHIFT_TAGS else None


def lambda1_equality_family(g: SelfLoopGraph) -> int | None:
    """Return sigma when ``g`` is a looped clique on its loop set plus isolated
    vertices (sigma = 0 gives the empty graph), else None."""
    loops = g.loops
    for u, v in g.edges:
        if u not in loops or v not in loops:
            return None
    if g.m != g.sigma * (g.sigma - 1) // 2:
        return None
    return g.sigma


def spread_ratio_equality_condition(spec: Spectrum, n: int, sigma: int,
                                    tol: float = DEFAULT_EQ_TOL) -> bool:
    """True when every eigenvalue above the mean is the largest one and every
    eigenvalue below the mean is the smallest one.

    Values within ``tol`` of the mean ``sigma/n`` are left unconstrained.
    """
    top, bottom = spec.largest, spec.smallest
    if top - bottom <= tol:
        raise DegenerateSpread("all eigenvalues coincide")
    mean = sigma / n
    for x in spec.values:
        if x > mean + tol and abs(x - top) > tol:
            return False
        if x < mean - tol and abs(x - bottom) > tol:
            return False
    return True


def is_uniform_edgeless(g: SelfLoopGraph) -> bool:
    """Edgeless with no loops or with a loop on every vertex.

    This is the claimed equality set of the pair-product and
    ``sqrt(2 lambda_1^2 - 2 sigma^2/n)`` bounds; the sweep audits it.
    """
    return g.m == 0 and g.sigma in (0, g.n)


@dataclass(frozen=True)
class EqualityClassification:
    gutman_family: Family | None
    equal_shift_family: Family | None
    lambda1_family: int | None
    spread_ratio_condition: bool | None


def classify(g: SelfLoopGraph, spec: Spectrum | None = None,
             tol: float = DEFAULT_EQ_TOL) -> EqualityClassification:
    if spec is None:
        spec = eigenvalues(g)
    connected = len(connected_components(g)) == 1
    try:
        cond = spread_ratio_equality_condition(spec, g.n, g.sigma, tol)
    except DegenerateSpread:
        cond = None
    return EqualityClassification(
        gutman_family=matches_gutman_equality_family(g),
        equal_shift_family=matches_equal_shift_family(g) if connected else None,
        lambda1_family=lambda1_equality_family(g),
        spread_ratio_condition=cond,
    )
