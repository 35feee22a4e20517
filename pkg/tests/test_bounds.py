import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loopenergy.bounds import (
    bound_report,
    energy,
    gutman_upper,
    improved_upper,
    lambda1_bounds,
    ozeki_lower,
    pair_product,
    spectral_lower,
    spread_ratio_lower,
    ultimate_energy,
    ultimate_energy_lower,
)
from loopenergy.errors import OrderTooSmall
from loopenergy.graph import disjoint_union, from_edge_list, make_family
from loopenergy.spectral import Spectrum, eigenvalues, shifted_spectrum

from conftest import graphs

SQ3, SQ5 = math.sqrt(3), math.sqrt(5)
C4 = from_edge_list(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [])
STAR = from_edge_list(4, [(0, 1), (0, 2), (0, 3)], [])
P3 = from_edge_list(3, [(0, 1), (1, 2)], [])


def mu_of(g):
    return shifted_spectrum(eigenvalues(g), g.n, g.sigma)


def brute_pair_product(mu):
    a = [abs(x) for x in mu.mu]
    return sum(a[i] * a[j] for i, j in itertools.combinations(range(len(a)), 2))


def ozeki_holds(a, b):
    """Ozeki's inequality for nonnegative tuples, used as an oracle."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    n = len(a)
    lhs = (a @ a) * (b @ b) - (a @ b) ** 2
    rhs = n * n / 3 * (a.max() * b.max() - a.min() * b.min()) ** 2
    return lhs <= rhs + 1e-9 * max(1.0, rhs)


# -- energy --------------------------------------------------------------------


def test_energy_examples():
    assert energy(mu_of(make_family("k2_tilde", 2))) == pytest.approx(SQ5, abs=1e-10)
    for n in (1, 3, 6):
        assert energy(mu_of(make_family("nk1_hat", n))) == 0
    assert energy(mu_of(C4)) == pytest.approx(4, abs=1e-10)


def test_gutman_examples():
    assert gutman_upper(2, 1, 1) == pytest.approx(SQ5, abs=1e-12)
    assert gutman_upper(5, 0, 0) == 0
    assert gutman_upper(4, 4, 0) == pytest.approx(5.6568542495, abs=1e-10)


def test_gutman_reduces_to_mcclelland():
    for n in range(1, 8):
        for m in range(n * (n - 1) // 2 + 1):
            assert gutman_upper(n, m, 0) == pytest.approx(math.sqrt(2 * m * n), abs=1e-12)


def test_improved_examples():
    val, rad = improved_upper(4, 4, 0, mu_of(C4))
    assert rad == pytest.approx(24, abs=1e-10)
    assert val == pytest.approx(4.8989794856, abs=1e-10)

    k2t = make_family("k2_tilde", 2)
    val, _ = improved_upper(2, 1, 1, mu_of(k2t))
    assert val == pytest.approx(gutman_upper(2, 1, 1), abs=1e-12)

    val, rad = improved_upper(4, 3, 0, mu_of(STAR))
    assert rad == pytest.approx(18, abs=1e-10)
    assert val == pytest.approx(4.2426406871, abs=1e-10)


def test_improved_needs_two_vertices():
    with pytest.raises(OrderTooSmall):
        improved_upper(1, 0, 0, mu_of(make_family("k1", 1)))


def test_lambda1_bound_examples():
    lo, hi = lambda1_bounds(2, 1, 2)
    assert (lo, hi) == (2, 2)
    assert eigenvalues(make_family("k2_hat", 2)).largest == pytest.approx(2, abs=1e-12)
    lo, hi = lambda1_bounds(2, 1, 1)
    assert lo == 1.5 and hi == pytest.approx(1.7320508076, abs=1e-10)
    assert lo < eigenvalues(make_family("k2_tilde", 2)).largest < hi
    assert lambda1_bounds(4, 0, 0) == (0, 0)


def test_pair_product_examples():
    g = make_family("nk1", 3)
    assert pair_product(mu_of(g), 3, 0, 0) == (0, 0)
    lhs, rhs = pair_product(mu_of(make_family("k2_tilde", 2)), 2, 1, 1)
    assert lhs == pytest.approx(1.25, abs=1e-12) and rhs == 1.25
    lhs, rhs = pair_product(mu_of(make_family("kn_hat", 3)), 3, 3, 3)
    assert lhs == pytest.approx(5, abs=1e-10) and rhs == 3


@given(graphs(max_n=8))
def test_pair_product_identity_matches_double_loop(g):
    mu = mu_of(g)
    lhs, _ = pair_product(mu, g.n, g.m, g.sigma)
    assert lhs == pytest.approx(brute_pair_product(mu), abs=1e-9)


def test_spectral_lower_examples():
    assert spectral_lower(0.0, 4, 0) == (0, 0)
    val, rad = spectral_lower(eigenvalues(STAR).largest, 4, 0)
    assert rad == pytest.approx(6, abs=1e-10)
    assert val == pytest.approx(2.4494897428, abs=1e-10)
    assert val <= 2 * SQ3
    for n in (2, 3, 5):
        val, rad = spectral_lower(1.0, n, n)
        assert rad == pytest.approx(2 - 2 * n) and val == 0


def test_ozeki_examples():
    val, rad = ozeki_lower(4, 4, 0, mu_of(C4))
    assert rad == pytest.approx(32 / 3, abs=1e-10)
    assert val == pytest.approx(3.2659863237, abs=1e-10)
    val, rad = ozeki_lower(2, 1, 1, mu_of(make_family("k2_tilde", 2)))
    assert rad == pytest.approx(5, abs=1e-10) and val == pytest.approx(SQ5, abs=1e-10)
    val, rad = ozeki_lower(4, 3, 0, mu_of(STAR))
    assert rad == pytest.approx(8, abs=1e-10)
    assert val == pytest.approx(2.8284271247, abs=1e-10)


def test_spread_ratio_examples():
    assert spread_ratio_lower(eigenvalues(C4), 4, 4, 0) == pytest.approx(4, abs=1e-10)
    assert spread_ratio_lower(eigenvalues(STAR), 4, 3, 0) == pytest.approx(2 * SQ3, abs=1e-10)
    assert spread_ratio_lower(eigenvalues(make_family("nk1", 3)), 3, 0, 0) is None
    assert spread_ratio_lower(eigenvalues(make_family("nk1_hat", 3)), 3, 0, 3) is None


def test_ultimate_energy_examples():
    assert ultimate_energy([1, 2, 3]) == 2
    assert ultimate_energy([4, 4, 4]) == 0
    assert ultimate_energy_lower([1, 2, 3]) == 2
    assert ultimate_energy_lower([0, 0, 3]) == pytest.approx(4)
    assert ultimate_energy([0, 0, 3]) == pytest.approx(4)
    assert ultimate_energy_lower([7, 7]) is None


@given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=2, max_size=12))
def test_ultimate_energy_lower_bound_holds(xs):
    lo = ultimate_energy_lower(xs, tol=1e-9)
    if lo is not None:
        assert lo <= ultimate_energy(xs) + 1e-9 * max(1.0, ultimate_energy(xs))


@given(graphs(max_n=8))
def test_ultimate_energy_of_spectrum_is_energy(g):
    spec = eigenvalues(g)
    assert ultimate_energy(spec.values) == pytest.approx(energy(mu_of(g)), abs=1e-10)


@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=10))
def test_ozeki_oracle_self_check(a):
    assert ozeki_holds(a, [1.0] * len(a))


@given(graphs(min_n=2, max_n=8))
def test_all_bounds_hold_on_random_graphs(g):
    tol = 1e-9
    r = bound_report(g)
    e = r.energy
    mu = mu_of(g)
    assert e >= 0
    assert e <= r.gutman_upper + tol
    assert e <= r.improved_upper + tol
    assert r.improved_upper <= r.gutman_upper + tol
    assert r.improved_radicand >= e * e / g.n - tol
    assert r.lambda1_lower - tol <= r.lambda1 <= r.lambda1_upper + tol
    assert r.pair_product_lhs >= r.pair_product_rhs - tol
    assert r.spectral_lower <= e + tol
    assert r.ozeki_lower <= e + tol
    assert r.spread_ratio_lower is None or r.spread_ratio_lower <= e + tol
    # the refined upper bound rests on the Lagrange identity; check it directly
    a = [abs(x) for x in mu.mu]
    lagrange = sum((x - y) ** 2 for x, y in itertools.combinations(a, 2))
    assert g.n * sum(x * x for x in a) - e * e == pytest.approx(lagrange, abs=1e-8)
    assert ozeki_holds(a, [1.0] * g.n)


@given(graphs(min_n=2, max_n=8))
def test_improved_matches_simple_graph_form_without_loops(g):
    g = from_edge_list(g.n, g.edges, [])
    spec = eigenvalues(g)
    mags = sorted((abs(x) for x in spec.values), reverse=True)
    expected = math.sqrt(max(0.0, 2 * g.m * g.n - g.n / 2 * (mags[0] - mags[-1]) ** 2))
    val, _ = improved_upper(g.n, g.m, 0, mu_of(g))
    assert val == pytest.approx(expected, abs=1e-9)


def test_report_examples():
    r = bound_report(make_family("half_k2_hat", 4))
    assert r.energy == pytest.approx(4, abs=1e-10)
    assert r.gutman_upper == pytest.approx(4, abs=1e-12)
    assert r.equality_flags["gutman"]

    r = bound_report(make_family("half_k1_union_half_k1hat", 4))
    assert r.energy == pytest.approx(2, abs=1e-10)
    assert r.gutman_upper == pytest.approx(2, abs=1e-12)
    assert r.equality_flags["gutman"]

    r = bound_report(make_family("kn_hat", 3))
    assert r.energy == pytest.approx(4, abs=1e-10)
    assert r.gutman_upper == pytest.approx(math.sqrt(18), abs=1e-10)
    assert not r.equality_flags["gutman"]


def test_report_flags_on_c4_and_k2_hat():
    r = bound_report(C4)
    assert r.equality_flags["spread_ratio"]
    assert not r.equality_flags["gutman"]
    r = bound_report(make_family("k2_hat", 2))
    assert r.equality_flags["lambda1_lower"] and r.equality_flags["lambda1_upper"]
    # equality outside the edgeless family: the audited clause does not hold here
    assert r.equality_flags["spectral_lower"]


def test_report_single_vertex_has_no_refined_bound():
    r = bound_report(make_family("k1_hat", 1))
    assert r.improved_upper is None and r.improved_radicand is None
    assert r.spread_ratio_lower is None
    assert not r.equality_flags["improved"]


def test_report_on_two_k2_tildes():
    k2t = make_family("k2_tilde", 2)
    r = bound_report(disjoint_union(k2t, k2t))
    assert r.energy == pytest.approx(2 * SQ5, abs=1e-10)
    assert r.equality_flags["gutman"] and r.equality_flags["improved"]


def test_report_respects_given_spectrum():
    spec = Spectrum((2.0, 0.0, 0.0, -2.0))
    r = bound_report(C4, spec=spec)
    assert r.energy == 4.0
