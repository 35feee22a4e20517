"""Energy of graphs with self-loops and the spectral bounds around it."""

from .bounds import BoundReport, bound_report, energy, gutman_upper
from .graph import (
    Family,
    FamilyTag,
    SelfLoopGraph,
    adjacency_matrix,
    canonical_code,
    connected_components,
    disjoint_union,
    from_edge_list,
    make_family,
)
from .spectral import Spectrum, eigenvalues, shifted_spectrum
from .verify import SweepSummary, find_extremal, verify_all

__all__ = [
    "BoundReport",
    "Family",
    "FamilyTag",
    "SelfLoopGraph",
    "Spectrum",
    "SweepSummary",
    "adjacency_matrix",
    "bound_report",
    "canonical_code",
    "connected_components",
    "disjoint_union",
    "eigenvalues",
    "energy",
    "find_extremal",
    "from_edge_list",
    "gutman_upper",
    "make_family",
    "shifted_spectrum",
    "verify_all",
]
