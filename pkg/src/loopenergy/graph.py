"""Graphs with self-loops, named families, components and canonical codes.

A graph is a simple graph plus a set of looped vertices. Loops never appear
in the edge set; they only show up on the diagonal of the adjacency matrix.

Labeled graphs of order ``n`` are also addressed by an integer index: bit
``k`` holds the k-th vertex pair in ``itertools.combinations`` order, and the
``n`` bits after the ``n(n-1)/2`` edge bits hold the loops.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateEdge,
    DuplicateLoop,
    IncompatibleOrder,
    IndexOutOfRange,
    OrderTooLarge,
    SelfPairInEdgeList,
)

MAX_CANON_ORDER = 8


@dataclass(frozen=True)
class SelfLoopGraph:
    n: int
    edges: frozenset[tuple[int, int]]
    loops: frozenset[int]

    def __post_init__(self):
        if self.n < 1:
            raise IndexOutOfRange(f"order must be >= 1, got {self.n}")
        for u, v in self.edges:
            if u == v:
                raise SelfPairInEdgeList(f"edge ({u}, {v}) joins a vertex to itself")
            if not (0 <= u < v < self.n):
                raise IndexOutOfRange(f"edge ({u}, {v}) not normalized into [0, {self.n})")
        for v in self.loops:
            if not 0 <= v < self.n:
                raise IndexOutOfRange(f"loop vertex {v} outside [0, {self.n})")

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def sigma(self) -> int:
        return len(self.loops)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def neighbors(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def __repr__(self) -> str:
        return f"SelfLoopGraph(n={self.n}, edges={self.sorted_edges()}, loops={sorted(self.loops)})"


def from_edge_list(n: int, edges: Iterable[Sequence[int]] = (), loops: Iterable[int] = ()) -> SelfLoopGraph:
    """Validate raw lists and build a graph.

    Edges are unordered, so ``(1, 0)`` after ``(0, 1)`` is a duplicate.
    """
    if n < 1:
        raise IndexOutOfRange(f"order must be >= 1, got {n}")
    seen: set[tuple[int, int]] = set()
    for e in edges:
        u, v = (int(x) for x in e)
        if not (0 <= u < n and 0 <= v < n):
            raise IndexOutOfRange(f"edge ({u}, {v}) outside [0, {n})")
        if u == v:
            raise SelfPairInEdgeList(f"edge ({u}, {u}); use a loop instead")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {key} listed twice")
        seen.add(key)
    loop_set: set[int] = set()
    for v in loops:
        v = int(v)
        if not 0 <= v < n:
            raise IndexOutOfRange(f"loop vertex {v} outside [0, {n})")
        if v in loop_set:
            raise DuplicateLoop(f"loop on vertex {v} listed twice")
        loop_set.add(v)
    return SelfLoopGraph(n, frozenset(seen), frozenset(loop_set))


def adjacency_matrix(g: SelfLoopGraph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=np.int64)
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1
    for v in g.loops:
        a[v, v] = 1
    return a


# ---------------------------------------------------------------------------
# named families
# ---------------------------------------------------------------------------


class FamilyTag(enum.Enum):
    K1 = "k1"
    K1_HAT = "k1_hat"
    K2 = "k2"
    K2_TILDE = "k2_tilde"
    K2_HAT = "k2_hat"
    KN = "kn"
    KN_HAT = "kn_hat"
    NK1 = "nk1"
    NK1_HAT = "nk1_hat"
    HALF_K2 = "half_k2"
    HALF_K2_TILDE = "half_k2_tilde"
    HALF_K2_HAT = "half_k2_hat"
    HALF_K1_UNION_HALF_K1HAT = "half_k1_union_half_k1hat"
    KSIGMA_HAT_UNION_ISOLATED = "ksigma_hat_union_isolated"
    OTHER = "other"

    @classmethod
    def parse(cls, name: str | FamilyTag) -> FamilyTag:
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        for tag in cls:
            if tag.value == key:
                return tag
        raise ValueError(f"unknown family tag {name!r}")


@dataclass(frozen=True)
class Family:
    """A family tag together with the order (and loop count) it was matched at."""

    tag: FamilyTag
    n: int | None = None
    sigma: int | None = None

    def __str__(self) -> str:
        if self.tag is FamilyTag.OTHER:
            return "OTHER"
        if self.tag is FamilyTag.KSIGMA_HAT_UNION_ISOLATED:
            return f"{self.tag.name}(n={self.n}, sigma={self.sigma})"
        return f"{self.tag.name}(n={self.n})"


_FIXED_ORDER = {
    FamilyTag.K1: 1,
    FamilyTag.K1_HAT: 1,
    FamilyTag.K2: 2,
    FamilyTag.K2_TILDE: 2,
    FamilyTag.K2_HAT: 2,
}

_HALF = {
    FamilyTag.HALF_K2,
    FamilyTag.HALF_K2_TILDE,
    FamilyTag.HALF_K2_HAT,
    FamilyTag.HALF_K1_UNION_HALF_K1HAT,
}


def make_family(tag: FamilyTag | str, n: int, sigma: int | None = None) -> SelfLoopGraph:
    """Build a named family member; components occupy contiguous vertex blocks."""
    tag = FamilyTag.parse(tag)
    if tag is FamilyTag.OTHER:
        raise IncompatibleOrder("OTHER is not a constructible family")
    if n < 1:
        raise IncompatibleOrder(f"{tag.name} needs n >= 1, got {n}")
    if tag in _FIXED_ORDER and n != _FIXED_ORDER[tag]:
        raise IncompatibleOrder(f"{tag.name} has order {_FIXED_ORDER[tag]}, got n={n}")
    if tag in _HALF and n % 2:
        raise IncompatibleOrder(f"{tag.name} needs even n, got {n}")

    edges: list[tuple[int, int]] = []
    loops: list[int] = []
    half = n // 2
    if tag in (FamilyTag.K1, FamilyTag.NK1):
        pass
    elif tag in (FamilyTag.K1_HAT, FamilyTag.NK1_HAT):
        loops = list(range(n))
    elif tag is FamilyTag.K2:
        edges = [(0, 1)]
    elif tag is FamilyTag.K2_TILDE:
        edges, loops = [(0, 1)], [0]
    elif tag is FamilyTag.K2_HAT:
        edges, loops = [(0, 1)], [0, 1]
    elif tag in (FamilyTag.KN, FamilyTag.KN_HAT):
        edges = list(itertools.combinations(range(n), 2))
        loops = list(range(n)) if tag is FamilyTag.KN_HAT else []
    elif tag is FamilyTag.HALF_K2:
        edges = [(2 * i, 2 * i + 1) for i in range(half)]
    elif tag is FamilyTag.HALF_K2_TILDE:
        edges = [(2 * i, 2 * i + 1) for i in range(half)]
        loops = [2 * i for i in range(half)]
    elif tag is FamilyTag.HALF_K2_HAT:
        edges = [(2 * i, 2 * i + 1) for i in range(half)]
        loops = list(range(n))
    elif tag is FamilyTag.HALF_K1_UNION_HALF_K1HAT:
        loops = list(range(half, n))
    elif tag is FamilyTag.KSIGMA_HAT_UNION_ISOLATED:
        if sigma is None or not 0 <= sigma <= n:
            raise IncompatibleOrder(f"{tag.name} needs 0 <= sigma <= n, got sigma={sigma}")
        edges = list(itertools.combinations(range(sigma), 2))
        loops = list(range(sigma))
    return from_edge_list(n, edges, loops)


def disjoint_union(a: SelfLoopGraph, b: SelfLoopGraph) -> SelfLoopGraph:
    s = a.n
    edges = set(a.edges) | {(u + s, v + s) for u, v in b.edges}
    loops = set(a.loops) | {v + s for v in b.loops}
    return SelfLoopGraph(a.n + b.n, frozenset(edges), frozenset(loops))


def induced_subgraph(g: SelfLoopGraph, vertices: Sequence[int]) -> SelfLoopGraph:
    """Subgraph on ``vertices``, relabeled 0..k-1 in the given order."""
    pos = {v: i for i, v in enumerate(vertices)}
    edges = {
        (min(pos[u], pos[v]), max(pos[u], pos[v]))
        for u, v in g.edges
        if u in pos and v in pos
    }
    loops = {pos[v] for v in g.loops if v in pos}
    return SelfLoopGraph(len(vertices), frozenset(edges), frozenset(loops))


def connected_components(g: SelfLoopGraph) -> list[SelfLoopGraph]:
    adj = g.neighbors()
    seen = [False] * g.n
    parts = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        comp, stack = [start], [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        parts.append(induced_subgraph(g, sorted(comp)))
    return parts


def is_connected(g: SelfLoopGraph) -> bool:
    return len(connected_components(g)) == 1


# ---------------------------------------------------------------------------
# integer indices and canonical codes
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def vertex_pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(itertools.combinations(range(n), 2))


def index_width(n: int) -> int:
    """Number of bits in a labeled-graph index of order n."""
    return n * (n + 1) // 2


def to_index(g: SelfLoopGraph) -> int:
    pairs = vertex_pairs(g.n)
    bits = 0
    for k, p in enumerate(pairs):
        if p in g.edges:
            bits |= 1 << k
    base = len(pairs)
    for v in g.loops:
        bits |= 1 << (base + v)
    return bits


def from_index(n: int, bits: int) -> SelfLoopGraph:
    bits = int(bits)
    if not 0 <= bits < (1 << index_width(n)):
        raise IndexOutOfRange(f"index {bits} outside [0, 2^{index_width(n)})")
    pairs = vertex_pairs(n)
    edges = frozenset(p for k, p in enumerate(pairs) if bits >> k & 1)
    base = len(pairs)
    loops = frozenset(v for v in range(n) if bits >> (base + v) & 1)
    return SelfLoopGraph(n, edges, loops)


@lru_cache(maxsize=None)
def _permutation_weights(n: int) -> np.ndarray:
    """Weight matrix W with ``code(pi(g)) = bits(g) @ W[:, pi]``.

    Code bit t (t = 0 is the most significant) is the t-th character of the
    code string: edge bits in pair order, then loop bits. Float64 is exact
    here since codes stay below 2**36.
    """
    pairs = vertex_pairs(n)
    slot = {p: k for k, p in enumerate(pairs)}
    width = index_width(n)
    base = len(pairs)
    perms = list(itertools.permutations(range(n)))
    w = np.zeros((width, len(perms)))
    for c, pi in enumerate(perms):
        for k, (i, j) in enumerate(pairs):
            a, b = pi[i], pi[j]
            t = slot[(a, b) if a < b else (b, a)]
            w[k, c] = 2.0 ** (width - 1 - t)
        for i in range(n):
            w[base + i, c] = 2.0 ** (width - 1 - (base + pi[i]))
    return w


def canonical_codes(n: int, indices: np.ndarray, chunk: int | None = None) -> np.ndarray:
    """Minimal code over all relabelings, for an array of labeled indices.

    Returns integers whose binary expansion (``index_width(n)`` digits, most
    significant first) is the canonical code string.
    """
    if n > MAX_CANON_ORDER:
        raise OrderTooLarge(f"canonical codes need n <= {MAX_CANON_ORDER}, got {n}")
    indices = np.asarray(indices, dtype=np.int64)
    w = _permutation_weights(n)
    width = w.shape[0]
    if chunk is None:
        chunk = max(1, (1 << 22) // w.shape[1])
    shifts = np.arange(width, dtype=np.int64)
    out = np.empty(indices.size, dtype=np.int64)
    for lo in range(0, indices.size, chunk):
        x = indices[lo:lo + chunk]
        bits = ((x[:, None] >> shifts) & 1).astype(np.float64)
        out[lo:lo + chunk] = (bits @ w).min(axis=1).astype(np.int64)
    return out


def code_string(n: int, code: int) -> str:
    return format(int(code), f"0{index_width(n)}b")


def canonical_code(g: SelfLoopGraph) -> str:
    """Bit string of the lexicographically smallest relabeling.

    Equal strings mean isomorphic graphs (loops included).
    """
    code = canonical_codes(g.n, np.array([to_index(g)]))[0]
    return code_string(g.n, code)


def code_to_index(n: int, code: int | np.ndarray):
    """Labeled index of the graph a code spells out (the canonical representative)."""
    width = index_width(n)
    code = np.asarray(code, dtype=np.int64)
    out = np.zeros_like(code)
    for t in range(width):
        out |= ((code >> (width - 1 - t)) & 1) << t
    return out if out.ndim else int(out)


def order_of_code(code: str) -> int:
    width = len(code)
    n = 1
    while index_width(n) < width:
        n += 1
    if index_width(n) != width or set(code) - {"0", "1"}:
        raise ValueError(f"not a canonical code: {code!r}")
    return n


def graph_from_code(code: str) -> SelfLoopGraph:
    n = order_of_code(code)
    return from_index(n, code_to_index(n, int(code, 2)))
