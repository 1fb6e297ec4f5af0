from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbit_designs.groups import (MIN_RANK, a_orbit_oracle, build_group, corner_orbit,
                                  corner_orbit_size, corner_vectors, group_elements, is_orthogonal,
                                  mat_mul, mat_vec, molien_dims, orbit)
from orbit_designs.scalar import MP, to_mpf

TYPES_RANKS = [("A", n) for n in range(2, 9)] + [("B", n) for n in range(2, 9)] + \
    [("D", n) for n in range(4, 9)]


def swap(n, i, j):
    g = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
    g[i][i] = g[j][j] = Fraction(0)
    g[i][j] = g[j][i] = Fraction(1)
    return tuple(tuple(r) for r in g)


def test_build_b3():
    G = build_group("B", 3)
    neg = tuple(tuple(Fraction(-1 if r == c == 2 else int(r == c)) for c in range(3)) for r in range(3))
    assert set(G.generators) == {swap(3, 0, 1), swap(3, 1, 2), neg}
    assert G.exponents == (1, 3, 5)
    assert G.order == 48


def test_build_a2_d4():
    A2 = build_group("A", 2)
    assert (A2.exponents, A2.order) == ((1, 2), 6)
    D4 = build_group("D", 4)
    assert (D4.exponents, D4.order) == ((1, 3, 3, 5), 192)


@pytest.mark.parametrize("t", "ABD")
def test_rank_below_minimum(t):
    with pytest.raises(ValueError):
        build_group(t, MIN_RANK[t] - 1)
    with pytest.raises(ValueError):
        build_group("E", 6)


@pytest.mark.parametrize("t,n", TYPES_RANKS)
def test_generators_are_involutions(t, n):
    G = build_group(t, n)
    eye = tuple(tuple(Fraction(int(r == c)) for c in range(n)) for r in range(n))
    for g in G.generators:
        assert is_orthogonal(g)
        assert mat_mul(g, g) == eye


@pytest.mark.parametrize("t,n", [("B", 3), ("A", 3), ("D", 4), ("A", 2)])
def test_group_order_by_enumeration(t, n):
    G = build_group(t, n)
    expected = {"A": factorial(n + 1), "B": 2 ** n * factorial(n), "D": 2 ** (n - 1) * factorial(n)}[t]
    assert len(group_elements(G)) == G.order == expected


@pytest.mark.parametrize("t,n", TYPES_RANKS)
def test_corner_vectors_orthogonality(t, n):
    G = build_group(t, n)
    for cv in corner_vectors(t, n):
        for j, alpha in enumerate(G.fundamental_roots):
            d = sum(x * y for x, y in zip(cv.scaled, alpha))
            assert (d == 0) == (j != cv.k - 1)


def test_b_and_d_corner_shapes():
    for cv in corner_vectors("B", 5):
        assert cv.scaled == tuple([1] * cv.k + [0] * (5 - cv.k))
    cvs = corner_vectors("D", 6)
    assert cvs[5].scaled == (1,) * 6
    assert cvs[4].scaled == (1,) * 5 + (-1,)


def _solve_corner_numerically(G, k):
    """Unit vector orthogonal to every root but alpha_k, by an mpmath nullspace."""
    rows = [[to_mpf(x) for x in a] for j, a in enumerate(G.fundamental_roots) if j != k - 1]
    n = G.n
    M = MP.matrix(rows + [[0] * n])
    U, S, V = MP.svd_r(M)
    v = [V[n - 1, i] for i in range(n)]
    norm = MP.sqrt(MP.fsum(x * x for x in v))
    v = [x / norm for x in v]
    if MP.fsum(x * to_mpf(a) for x, a in zip(v, G.fundamental_roots[k - 1])) < 0:
        v = [-x for x in v]
    return v


def test_a4_corner_vectors_match_both_oracles():
    n = 4
    G = build_group("A", n)
    s = MP.sqrt(n + 1)
    for cv in corner_vectors("A", n):
        k = cv.k
        den = MP.sqrt(k * (n + 1 - k) * (n + 2 + 2 * s))
        closed = [(n + 1 - k + s) / den] * k + [-k / den] * (n - k)
        solved = _solve_corner_numerically(G, k)
        unit = [to_mpf(x) for x in cv.unit]
        for a, b, c in zip(unit, closed, solved):
            assert abs(a - b) < MP.mpf(10) ** -60
            assert abs(a - c) < MP.mpf(10) ** -40
        # squared norm of the radical-free vector
        assert abs(to_mpf(cv.norm2) - k * (n + 1 - k) * (1 + s) ** 2) < MP.mpf(10) ** -60


def test_orbit_examples():
    B3 = build_group("B", 3)
    o = corner_orbit(B3, 1)
    pts = {tuple(int(x) for x in p) for p in o.points}
    assert pts == {(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)}
    assert corner_orbit(build_group("A", 2), 1).size == 3
    D4 = build_group("D", 4)
    o = corner_orbit(D4, 4)
    assert o.size == 8
    assert all(sum(1 for x in p if x < 0) % 2 == 0 for p in o.points)


@pytest.mark.parametrize("t,n", TYPES_RANKS)
def test_orbit_sizes_closed_form(t, n):
    G = build_group(t, n)
    for k in range(1, n + 1):
        o = corner_orbit(G, k)
        assert o.size == corner_orbit_size(t, n, k)
        assert G.order % o.size == 0
        assert len(set(o.points)) == o.size


def test_closed_form_sizes():
    assert corner_orbit_size("A", 5, 2) == comb(6, 2)
    assert corner_orbit_size("B", 5, 2) == 4 * comb(5, 2)
    assert corner_orbit_size("D", 5, 5) == 16


@pytest.mark.parametrize("n", range(2, 8))
def test_a_orbit_matches_union_description(n):
    G = build_group("A", n)
    for k in range(1, n + 1):
        assert set(corner_orbit(G, k).points) == a_orbit_oracle(n, k)


@pytest.mark.parametrize("n", range(2, 8))
def test_orbit_antipodal_relations(n):
    A = build_group("A", n)
    for k in range(1, n + 1):
        ok = corner_orbit(A, k)
        other = corner_orbit(A, n + 1 - k)
        # the scaled representatives have different norms; compare directions
        unit_k = {tuple(to_mpf(x) / MP.sqrt(to_mpf(ok.norm2)) for x in p) for p in ok.points}
        unit_o = [tuple(-to_mpf(x) / MP.sqrt(to_mpf(other.norm2)) for x in p) for p in other.points]
        for p in unit_o:
            assert min(max(abs(a - b) for a, b in zip(p, q)) for q in unit_k) < MP.mpf(10) ** -50
    B = build_group("B", n)
    for k in range(1, n + 1):
        pts = set(corner_orbit(B, k).points)
        assert {tuple(-x for x in p) for p in pts} == pts


@pytest.mark.parametrize("n", [5, 7])
def test_d_odd_spin_orbits_are_opposite(n):
    D = build_group("D", n)
    a = set(corner_orbit(D, n).points)
    b = set(corner_orbit(D, n - 1).points)
    assert {tuple(-x for x in p) for p in b} == a


def test_molien_examples():
    assert molien_dims(build_group("B", 2), 8) == [1, 0, 0, 0, 1, 0, 0, 0, 1]
    d4 = molien_dims(build_group("D", 4), 8)
    assert (d4[4], d4[6], d4[8]) == (2, 1, 3)
    a3 = molien_dims(build_group("A", 3), 6)
    assert (a3[3], a3[4], a3[5], a3[6]) == (1, 1, 0, 1)


@given(st.sampled_from([("A", 3), ("B", 3), ("D", 4), ("B", 2)]),
       st.lists(st.integers(-4, 4), min_size=4, max_size=4))
def test_orbit_closed_under_generators(tn, coords):
    t, n = tn
    x = tuple(Fraction(c) for c in coords[:n])
    if all(c == 0 for c in x):
        return
    G = build_group(t, n)
    o = orbit(G, x)
    pts = set(o.points)
    assert G.order % o.size == 0
    n2 = sum(c * c for c in x)
    for p in o.points:
        assert sum(c * c for c in p) == n2
        for g in G.generators:
            assert mat_vec(g, p) in pts
