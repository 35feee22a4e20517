"""Exhaustive checking of every bound over all small self-loop graphs.

The index space of each order is cut into chunks. A chunk is turned into a
stack of adjacency matrices, solved with the batched Jacobi routine, and all
bounds are evaluated as arrays. Chunks are independent and their partial
summaries merge associatively, so ``jobs > 1`` only changes wall time.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np

from . import bounds as B
from .errors import NoConvergence, OrderTooLarge, UnknownBoundId
from .extremal import (
    lambda1_equality_family,
    matches_equal_shift_family,
    matches_gutman_equality_family,
)
from .graph import (
    SelfLoopGraph,
    canonical_codes,
    code_string,
    code_to_index,
    from_index,
    index_width,
    vertex_pairs,
)
from .spectral import jacobi_eigh_batch

MAX_ORDER = 8
MAX_DEDUP_ORDER = 7
CHUNK = 1 << 14
WITNESS_CAP = 1000
# |mu|_max - |mu|_min above this must give a visible improvement over gutman
STRICT_SPREAD = 1e-6

CHECK_IDS = (
    "gutman",
    "improved",
    "improved_vs_gutman",
    "improved_radicand",
    "improved_strict",
    "lambda1_lower",
    "lambda1_upper",
    "pair_product",
    "spectral_lower",
    "ozeki",
    "spread_ratio",
)

# characterizations the sweep expects to reproduce exactly
VALIDATED = ("gutman_equality", "equal_shift", "lambda1_upper_equality", "spread_ratio_equality")
# equality clauses that are audited and only reported
AUDITED = ("pair_product_equality", "spectral_lower_equality")

STATED_ONLY = "stated-only"
OBSERVED_ONLY = "observed-only"


class GraphIndex(NamedTuple):
    n: int
    bits: int

    def graph(self) -> SelfLoopGraph:
        return from_index(self.n, self.bits)


@dataclass(frozen=True)
class Violation:
    index: GraphIndex
    check: str
    energy: float
    bound: float
    compared: float


@dataclass(frozen=True)
class Mismatch:
    index: GraphIndex
    check: str
    direction: str


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _check_order(n: int, dedup: bool) -> None:
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    if n > MAX_ORDER:
        raise OrderTooLarge(f"enumeration supports n <= {MAX_ORDER}, got {n}")
    if dedup and n > MAX_DEDUP_ORDER:
        raise OrderTooLarge(f"isomorphism reduction supports n <= {MAX_DEDUP_ORDER}, got {n}")


@lru_cache(maxsize=None)
def isomorphism_classes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(codes, indices)`` of one canonical representative per class, sorted by code.

    Built by growing every class of order n-1 with a new vertex (any
    neighbourhood, looped or not) and canonicalizing the results.
    """
    _check_order(n, dedup=True)
    if n == 1:
        codes = np.array([0, 1], dtype=np.int64)
        return codes, code_to_index(1, codes)
    _, prev = isomorphism_classes(n - 1)
    k = n - 1
    slot = {p: t for t, p in enumerate(vertex_pairs(n))}
    old_edges = len(vertex_pairs(k))
    new_edges = len(slot)
    base = np.zeros_like(prev)
    for t, p in enumerate(vertex_pairs(k)):
        base |= ((prev >> t) & 1) << slot[p]
    for i in range(k):
        base |= ((prev >> (old_edges + i)) & 1) << (new_edges + i)
    ext = np.arange(1 << n, dtype=np.int64)
    add = np.zeros_like(ext)
    for i in range(k):
        add |= ((ext >> i) & 1) << slot[(i, k)]
    add |= ((ext >> k) & 1) << (new_edges + k)
    candidates = (base[:, None] | add[None, :]).ravel()
    codes = np.unique(canonical_codes(n, candidates))
    return codes, code_to_index(n, codes)


def enumerate_graphs(n: int, dedup: bool = False) -> Iterator[SelfLoopGraph]:
    _check_order(n, dedup)
    if dedup:
        for bits in isomorphism_classes(n)[1]:
            yield from_index(n, int(bits))
    else:
        for bits in range(1 << index_width(n)):
            yield from_index(n, bits)


# ---------------------------------------------------------------------------
# batched evaluation
# ---------------------------------------------------------------------------


def adjacency_batch(n: int, idx: np.ndarray) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    a = np.zeros((idx.size, n, n))
    for k, (i, j) in enumerate(vertex_pairs(n)):
        bit = (idx >> k) & 1
        a[:, i, j] = bit
        a[:, j, i] = bit
    base = n * (n - 1) // 2
    for i in range(n):
        a[:, i, i] = (idx >> (base + i)) & 1
    return a


@dataclass
class Evaluation:
    """Every quantity of interest for a batch of graphs of one order."""

    n: int
    idx: np.ndarray
    m: np.ndarray
    sigma: np.ndarray
    lam: np.ndarray
    connected: np.ndarray
    max_degree: np.ndarray
    energy: np.ndarray
    abs_max: np.ndarray
    abs_min: np.ndarray
    residual: np.ndarray
    gutman: np.ndarray
    improved: np.ndarray
    improved_radicand: np.ndarray
    lambda1_lower: np.ndarray
    lambda1_upper: np.ndarray
    pair_lhs: np.ndarray
    pair_rhs: np.ndarray
    spectral_lower: np.ndarray
    spectral_radicand: np.ndarray
    ozeki: np.ndarray
    ozeki_radicand: np.ndarray
    spread_ratio: np.ndarray  # nan where undefined

    @property
    def lambda1(self) -> np.ndarray:
        return self.lam[:, 0]

    def pair(self, bound_id: str, tol: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(bound, reference, defined)`` arrays for a bound id."""
        ones = np.ones(self.idx.size, dtype=bool)
        if bound_id == "gutman":
            return self.gutman, self.energy, ones
        if bound_id == "improved":
            return self.improved, self.energy, ones if self.n >= 2 else ~ones
        if bound_id == "lambda1_lower":
            return self.lambda1_lower, self.lambda1, ones
        if bound_id == "lambda1_upper":
            return self.lambda1_upper, self.lambda1, ones
        if bound_id == "pair_product":
            return self.pair_rhs, self.pair_lhs, ones
        if bound_id == "spectral_lower":
            return self.spectral_lower, self.energy, ones
        if bound_id == "ozeki":
            return self.ozeki, self.energy, ones
        if bound_id == "spread_ratio":
            return self.spread_ratio, self.energy, ~np.isnan(self.spread_ratio)
        raise UnknownBoundId(bound_id)


def _popcount(x: np.ndarray, lo: int, hi: int) -> np.ndarray:
    out = np.zeros_like(x)
    for b in range(lo, hi):
        out += (x >> b) & 1
    return out


def evaluate(n: int, idx, tol: float = B.DEFAULT_EQ_TOL) -> Evaluation:
    idx = np.asarray(idx, dtype=np.int64)
    e_bits = n * (n - 1) // 2
    m = _popcount(idx, 0, e_bits)
    sigma = _popcount(idx, e_bits, e_bits + n)
    a = adjacency_batch(n, idx)
    try:
        lam = jacobi_eigh_batch(a)
    except NoConvergence as exc:
        bad = [GraphIndex(n, int(idx[p])) for p in exc.positions]
        raise NoConvergence(f"no convergence for {bad}", positions=exc.positions) from exc

    off = a.copy()
    off[:, np.arange(n), np.arange(n)] = 0.0
    max_degree = off.sum(axis=2).max(axis=1)
    reach = off + np.eye(n)
    for _ in range(max(1, int(np.ceil(np.log2(max(n, 2)))))):
        reach = np.minimum(reach @ reach, 1.0)
    connected = reach[:, 0, :].min(axis=1) > 0

    shift = sigma / n
    mu = lam - shift[:, None]
    amu = np.abs(mu)
    e = amu.sum(axis=1)
    abs_max, abs_min = amu.max(axis=1), amu.min(axis=1)
    d = abs_max - abs_min
    residual = np.maximum.reduce([
        np.abs(lam.sum(axis=1) - sigma),
        np.abs((lam ** 2).sum(axis=1) - (2 * m + sigma)),
        np.abs((mu ** 2).sum(axis=1) - (2 * m + sigma - sigma ** 2 / n)),
    ])

    imp_rad = B.improved_radicand(n, m, sigma, d)
    oz_rad = B.ozeki_radicand(n, m, sigma, d)
    sp_rad = B.spectral_radicand(lam[:, 0], n, sigma)
    spread = lam[:, 0] - lam[:, -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        spr = np.where(spread > tol, B.spread_numerator(n, m, sigma) / spread, np.nan)

    return Evaluation(
        n=n, idx=idx, m=m, sigma=sigma, lam=lam, connected=connected,
        max_degree=max_degree, energy=e, abs_max=abs_max, abs_min=abs_min,
        residual=residual,
        gutman=B.gutman_upper(n, m, sigma).astype(float),
        improved=B.clamped_sqrt(imp_rad) if n >= 2 else np.full(idx.size, np.nan),
        improved_radicand=imp_rad,
        lambda1_lower=(2 * m + sigma) / n,
        lambda1_upper=np.sqrt(2 * m + sigma),
        pair_lhs=(e * e - (amu * amu).sum(axis=1)) / 2.0,
        pair_rhs=B.pair_product_rhs(n, m, sigma),
        spectral_lower=B.clamped_sqrt(sp_rad), spectral_radicand=sp_rad,
        ozeki=B.clamped_sqrt(oz_rad), ozeki_radicand=oz_rad,
        spread_ratio=spr,
    )


def spread_condition(ev: Evaluation, tol: float) -> np.ndarray:
    """Vectorized form of :func:`extremal.spread_ratio_equality_condition`."""
    lam = ev.lam
    mean = (ev.sigma / ev.n)[:, None]
    top, bottom = lam[:, :1], lam[:, -1:]
    ok_above = (lam <= mean + tol) | (np.abs(lam - top) <= tol)
    ok_below = (lam >= mean - tol) | (np.abs(lam - bottom) <= tol)
    return (ok_above & ok_below).all(axis=1)


# ---------------------------------------------------------------------------
# sweep bookkeeping
# ---------------------------------------------------------------------------


@dataclass
class SweepSummary:
    max_n: int
    tol: float
    dedup: bool
    graphs_checked: int = 0
    graphs_by_order: dict[int, int] = field(default_factory=dict)
    violations: list[Violation] = field(default_factory=list)
    # (bound id, order) -> sorted canonical code ints, capped
    witness_codes: dict[tuple[str, int], list[int]] = field(default_factory=dict)
    characterization_mismatches: list[Mismatch] = field(default_factory=list)
    max_trace_residual: float = 0.0
    elapsed: float = 0.0

    def merge(self, other: SweepSummary) -> SweepSummary:
        self.graphs_checked += other.graphs_checked
        for n, c in other.graphs_by_order.items():
            self.graphs_by_order[n] = self.graphs_by_order.get(n, 0) + c
        self.violations.extend(other.violations)
        for key, codes in other.witness_codes.items():
            merged = set(self.witness_codes.get(key, ())) | set(codes)
            self.witness_codes[key] = sorted(merged)[:WITNESS_CAP]
        self.characterization_mismatches.extend(other.characterization_mismatches)
        self.max_trace_residual = max(self.max_trace_residual, other.max_trace_residual)
        return self

    def finalize(self) -> SweepSummary:
        self.violations.sort(key=lambda v: (v.index, v.check))
        self.characterization_mismatches.sort(key=lambda x: (x.index, x.check, x.direction))
        self.witness_codes = dict(sorted(self.witness_codes.items()))
        return self

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def equality_witnesses(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for (bound_id, n), codes in sorted(self.witness_codes.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            out.setdefault(bound_id, []).extend(code_string(n, c) for c in codes)
        return out

    def witnesses(self, bound_id: str, n: int) -> set[str]:
        return {code_string(n, c) for c in self.witness_codes.get((bound_id, n), ())}

    def mismatches(self, check: str | None = None) -> list[Mismatch]:
        return [x for x in self.characterization_mismatches if check is None or x.check == check]

    def mismatch_counts(self) -> dict[str, dict[str, int]]:
        counts = {c: {STATED_ONLY: 0, OBSERVED_ONLY: 0} for c in VALIDATED + AUDITED}
        for x in self.characterization_mismatches:
            counts[x.check][x.direction] += 1
        return counts

    def to_json(self) -> dict:
        return {
            "max_n": self.max_n,
            "tol": self.tol,
            "dedup": self.dedup,
            "graphs_checked": self.graphs_checked,
            "graphs_by_order": {str(k): v for k, v in sorted(self.graphs_by_order.items())},
            "violations": [
                {"n": v.index.n, "bits": v.index.bits, "check": v.check,
                 "energy": v.energy, "bound": v.bound, "compared": v.compared}
                for v in self.violations
            ],
            "equality_witnesses": self.equality_witnesses,
            "characterization_mismatches": [
                {"n": x.index.n, "bits": x.index.bits, "check": x.check, "direction": x.direction}
                for x in self.characterization_mismatches
            ],
            "mismatch_counts": self.mismatch_counts(),
            "validated_checks": list(VALIDATED),
            "audited_checks": list(AUDITED),
            "max_trace_residual": self.max_trace_residual,
            "elapsed": self.elapsed,
        }


def _classify_where(n: int, ev: Evaluation, candidates: np.ndarray, fn) -> np.ndarray:
    """Run a structural classifier on ``candidates``; everything else is outside."""
    out = np.zeros(ev.idx.size, dtype=bool)
    for pos in np.flatnonzero(candidates):
        out[pos] = fn(from_index(n, int(ev.idx[pos]))) is not None
    return out


def _compare(n, ev, check, stated, observed, out: list[Mismatch]) -> None:
    for pos in np.flatnonzero(stated & ~observed):
        out.append(Mismatch(GraphIndex(n, int(ev.idx[pos])), check, STATED_ONLY))
    for pos in np.flatnonzero(observed & ~stated):
        out.append(Mismatch(GraphIndex(n, int(ev.idx[pos])), check, OBSERVED_ONLY))


def check_batch(n: int, idx, tol: float) -> SweepSummary:
    ev = evaluate(n, idx, tol)
    part = SweepSummary(max_n=n, tol=tol, dedup=False)
    part.graphs_checked = int(ev.idx.size)
    part.graphs_by_order[n] = int(ev.idx.size)
    if ev.idx.size == 0:
        return part
    part.max_trace_residual = float(ev.residual.max())

    e = ev.energy
    slack_e = tol * np.maximum(1.0, e)
    slack_l = tol * np.maximum(1.0, ev.lambda1)
    nan = np.full(e.shape, np.nan)
    gap_d = ev.abs_max - ev.abs_min
    checks = {
        "gutman": (e - ev.gutman > slack_e, ev.gutman, e),
        "lambda1_lower": (ev.lambda1_lower - ev.lambda1 > slack_l, ev.lambda1_lower, ev.lambda1),
        "lambda1_upper": (ev.lambda1 - ev.lambda1_upper > slack_l, ev.lambda1_upper, ev.lambda1),
        "pair_product": (ev.pair_rhs - ev.pair_lhs > tol * np.maximum(1.0, ev.pair_lhs),
                         ev.pair_rhs, ev.pair_lhs),
        "spectral_lower": (ev.spectral_lower - e > slack_e, ev.spectral_lower, e),
        "ozeki": (ev.ozeki - e > slack_e, ev.ozeki, e),
        "spread_ratio": (np.nan_to_num(ev.spread_ratio, nan=-np.inf) - e > slack_e, ev.spread_ratio, e),
    }
    if n >= 2:
        e2n = e * e / n
        checks.update({
            "improved": (e - ev.improved > slack_e, ev.improved, e),
            "improved_vs_gutman": (ev.improved - ev.gutman > tol * np.maximum(1.0, ev.gutman),
                                   ev.improved, ev.gutman),
            "improved_radicand": (ev.improved_radicand < e2n - tol * np.maximum(1.0, e2n),
                                  ev.improved_radicand, e2n),
            "improved_strict": ((gap_d > STRICT_SPREAD) & (ev.gutman - ev.improved <= tol),
                                ev.improved, ev.gutman),
        })
    for check in CHECK_IDS:
        if check not in checks:
            continue
        mask, bound, compared = checks[check]
        for pos in np.flatnonzero(mask):
            part.violations.append(Violation(
                GraphIndex(n, int(ev.idx[pos])), check,
                float(e[pos]), float(bound[pos]), float(compared[pos]),
            ))

    eq = {}
    for bound_id in B.BOUND_IDS:
        bound, ref, defined = ev.pair(bound_id, tol)
        eq[bound_id] = defined & B.is_close(np.nan_to_num(bound, nan=np.inf), ref, tol)
    eq["equal_shift"] = ev.connected & (gap_d <= tol)
    for key, mask in eq.items():
        if mask.any():
            codes = np.unique(canonical_codes(n, ev.idx[mask]))
            part.witness_codes[(key, n)] = [int(c) for c in codes[:WITNESS_CAP]]

    out = part.characterization_mismatches
    # structural families, each run only on a necessary-condition prefilter plus the observed set
    gut_obs = np.abs(e - ev.gutman) <= tol
    gut_fam = _classify_where(n, ev, (ev.max_degree <= 1) | gut_obs, matches_gutman_equality_family)
    _compare(n, ev, "gutman_equality", gut_fam, gut_obs, out)

    shift_obs = eq["equal_shift"]
    shift_fam = _classify_where(n, ev, ev.connected & ((n <= 2) | shift_obs), matches_equal_shift_family)
    _compare(n, ev, "equal_shift", shift_fam, shift_obs, out)

    e_bits = n * (n - 1) // 2
    loop_mask = (ev.idx >> e_bits) & ((1 << n) - 1)
    inside = np.ones(ev.idx.size, dtype=bool)
    for k, (i, j) in enumerate(vertex_pairs(n)):
        has = ((ev.idx >> k) & 1).astype(bool)
        inside &= ~has | (((loop_mask >> i) & 1 & (loop_mask >> j)).astype(bool))
    lam1_obs = np.abs(ev.lambda1 - ev.lambda1_upper) <= tol
    lam1_fam = _classify_where(n, ev, inside | lam1_obs, lambda1_equality_family)
    _compare(n, ev, "lambda1_upper_equality", lam1_fam, lam1_obs, out)

    defined = ~np.isnan(ev.spread_ratio)
    cond = spread_condition(ev, tol) & defined
    _compare(n, ev, "spread_ratio_equality", cond, eq["spread_ratio"] & defined, out)

    uniform_edgeless = (ev.m == 0) & ((ev.sigma == 0) | (ev.sigma == n))
    _compare(n, ev, "pair_product_equality", uniform_edgeless, eq["pair_product"], out)
    _compare(n, ev, "spectral_lower_equality", uniform_edgeless, eq["spectral_lower"], out)
    return part


def _run_task(task) -> SweepSummary:
    n, lo, hi, idx, tol = task
    if idx is None:
        idx = np.arange(lo, hi, dtype=np.int64)
    return check_batch(n, idx, tol)


def _tasks(max_n: int, tol: float, dedup: bool, orders=None):
    for n in orders or range(1, max_n + 1):
        if dedup:
            reps = isomorphism_classes(n)[1]
            for lo in range(0, reps.size, CHUNK):
                yield (n, 0, 0, reps[lo:lo + CHUNK], tol)
        else:
            total = 1 << index_width(n)
            for lo in range(0, total, CHUNK):
                yield (n, lo, min(total, lo + CHUNK), None, tol)


def verify_all(max_n: int, tol: float = B.DEFAULT_EQ_TOL, dedup: bool = False,
               jobs: int = 1, orders=None) -> SweepSummary:
    """Check every bound and characterization for all graphs of order 1..max_n.

    ``orders`` restricts the sweep to a subset of orders (all must be <= max_n).
    """
    if max_n > MAX_ORDER:
        raise OrderTooLarge(f"sweeps support max_n <= {MAX_ORDER}, got {max_n}")
    for n in orders or range(1, max_n + 1):
        if n > max_n:
            raise ValueError(f"order {n} exceeds max_n={max_n}")
        _check_order(n, dedup)
    start = time.perf_counter()
    summary = SweepSummary(max_n=max_n, tol=tol, dedup=dedup)
    tasks = _tasks(max_n, tol, dedup, orders)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_run_task, tasks, chunksize=1):
                summary.merge(part)
    else:
        for task in tasks:
            summary.merge(_run_task(task))
    summary.elapsed = time.perf_counter() - start
    return summary.finalize()


# ---------------------------------------------------------------------------
# extremal search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremalEntry:
    code: str
    energy: float
    bound: float
    gap: float

    def graph(self) -> SelfLoopGraph:
        from .graph import graph_from_code

        return graph_from_code(self.code)


def find_extremal(n: int, sigma_filter: int | None, bound_id: str, top_k: int = 10,
                  tol: float = B.DEFAULT_EQ_TOL) -> list[ExtremalEntry]:
    """Isomorphism classes of order n ranked by how tight ``bound_id`` is."""
    if bound_id not in B.BOUND_IDS:
        raise UnknownBoundId(bound_id)
    _check_order(n, dedup=True)
    codes, reps = isomorphism_classes(n)
    if sigma_filter is not None:
        e_bits = n * (n - 1) // 2
        keep = _popcount(reps, e_bits, e_bits + n) == sigma_filter
        codes, reps = codes[keep], reps[keep]
    if reps.size == 0:
        return []
    ev = evaluate(n, reps, tol)
    bound, ref, defined = ev.pair(bound_id, tol)
    gap = np.abs(bound - ref)
    pos = np.flatnonzero(defined)
    # codes are already ascending, so a stable sort on gap breaks ties by code
    pos = pos[np.argsort(gap[pos], kind="stable")][:top_k]
    return [
        ExtremalEntry(code_string(n, codes[p]), float(ev.energy[p]), float(bound[p]), float(gap[p]))
        for p in pos
    ]
