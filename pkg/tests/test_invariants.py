from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbit_designs.groups import build_group, molien_dims
from orbit_designs.invariants import (MolienMismatchError, a_roots, closed_form_invariant,
                                      closed_form_labels, corner_value, evaluate_at_corner, h_poly,
                                      invariant_harm_basis, reynolds)
from orbit_designs.linalg import rank
from orbit_designs.poly import MultiPoly, act, harm_basis, hom_exponents, laplacian, msym
from orbit_designs.scalar import MP, Quad, is_zero, sign, to_mpf


def test_b2_degree6_is_empty():
    assert len(invariant_harm_basis(build_group("B", 2), 6)) == 0


def test_d4_degree4_has_two():
    assert len(invariant_harm_basis(build_group("D", 4), 4)) == 2


def test_a2_cubic():
    B = invariant_harm_basis(build_group("A", 2), 3)
    assert len(B) == 1
    (f,) = B.polys
    target = MultiPoly(2, {(3, 0): 1, (2, 1): -3, (1, 2): -3, (0, 3): 1})
    lead = f.coeff((3, 0))
    assert f * (1 / lead) == target


@pytest.mark.parametrize("t,n", [("A", 2), ("A", 3), ("A", 4), ("B", 3), ("B", 4), ("D", 4),
                                 ("D", 5), ("A", 5), ("B", 5), ("D", 6)])
def test_basis_counts_match_molien(t, n):
    G = build_group(t, n)
    q = molien_dims(G, 8)
    for l in range(9):
        B = invariant_harm_basis(G, l)
        assert len(B) == q[l]


@pytest.mark.parametrize("t,n,l", [("A", 3, 4), ("B", 3, 6), ("D", 4, 4), ("A", 4, 5)])
def test_basis_is_harmonic_and_invariant(t, n, l):
    G = build_group(t, n)
    for f in invariant_harm_basis(G, l).polys:
        assert laplacian(f).is_zero()
        for g in G.generators:
            assert (act(g, f) - f).is_zero()


def test_generator_method_agrees_with_symmetric_method():
    G = build_group("B", 3)
    for l in (4, 6, 8):
        a = invariant_harm_basis(G, l)
        b = invariant_harm_basis(G, l, method="generators")
        assert len(a) == len(b)
        exps = hom_exponents(3, l)
        rows = [[f.coeff(e) for e in exps] for f in a.polys + b.polys]
        assert rank(rows, len(exps)) == len(a)


def test_values_match_expanded_polys():
    G = build_group("D", 4)
    B = invariant_harm_basis(G, 6)
    x = (Fraction(1), Fraction(2), Fraction(-3), Fraction(1, 2))
    assert B.values(x) == [f(x) for f in B.polys]


def test_molien_mismatch_is_a_hard_error(monkeypatch):
    import orbit_designs.invariants as inv
    monkeypatch.setattr(inv, "_BASIS_CACHE", {})
    monkeypatch.setattr(inv, "molien_dims", lambda G, l: [0] * (l + 1))
    with pytest.raises(MolienMismatchError):
        inv.invariant_harm_basis(build_group("B", 2), 4)


# reynolds -------------------------------------------------------------------

def test_reynolds_b2_x4():
    x4 = MultiPoly.monomial(2, (4, 0))
    assert reynolds(build_group("B", 2), x4) == MultiPoly(2, {(4, 0): Fraction(1, 2), (0, 4): Fraction(1, 2)})


def test_reynolds_fixes_invariants_and_kills_odd():
    G = build_group("B", 3)
    f = closed_form_invariant("B", 3, "f4")
    assert reynolds(G, f) == f
    assert reynolds(G, MultiPoly.monomial(3, (2, 1, 0))).is_zero()


@given(st.integers(0, 10 ** 6))
def test_reynolds_lands_in_invariant_span(seed):
    import random
    rng = random.Random(seed)
    G = build_group("B", 3)
    l = rng.choice([4, 6])
    H = harm_basis(3, l)
    f = MultiPoly(3)
    for h in rng.sample(H, 3):
        f = f + h * Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    R = reynolds(G, f)
    assert laplacian(R).is_zero()
    exps = hom_exponents(3, l)
    basis = invariant_harm_basis(G, l).polys
    rows = [[p.coeff(e) for e in exps] for p in basis]
    assert rank(rows + [[R.coeff(e) for e in exps]], len(exps)) == len(basis)


# closed forms ---------------------------------------------------------------

@pytest.mark.parametrize("n", [3, 5, 8])
def test_b_f4_formula(n):
    expected = msym(n, (4,)) - msym(n, (2, 2)) * Fraction(6, n - 1)
    assert closed_form_invariant("B", n, "f4") == expected


def test_a3_f4():
    f = closed_form_invariant("A", 3, "f4")
    assert f == h_poly(3, "h4_1") - h_poly(3, "h4_3") * Fraction(20, 13)


def test_a4_f5():
    f = closed_form_invariant("A", 4, "f5")
    c2 = Quad(Fraction(17, 58), Fraction(-20, 58), 5)
    c3 = Quad(Fraction(180, 87), Fraction(10, 87), 5)
    assert f == h_poly(4, "h5_1") + h_poly(4, "h5_2") * c2 + h_poly(4, "h5_3") * c3


def test_unknown_labels():
    with pytest.raises(ValueError):
        closed_form_invariant("B", 3, "f5")
    with pytest.raises(ValueError):
        closed_form_invariant("D", 6, "f5")
    with pytest.raises(ValueError):
        corner_value("B", 3, 4, "f4")


@pytest.mark.parametrize("t,n", [("A", n) for n in range(2, 8)] + [("B", n) for n in range(2, 7)]
                         + [("D", n) for n in range(4, 8)])
def test_closed_forms_harmonic_and_invariant(t, n):
    G = build_group(t, n)
    for lab in closed_form_labels(t, n):
        f = closed_form_invariant(t, n, lab)
        assert laplacian(f).is_zero(), lab
        # the helpers and the degree-6 obstruction are only S_n-invariant
        gens = G.generators[:-1] if lab.startswith("h") or lab == "obstruction6" else G.generators
        for g in gens:
            assert (act(g, f) - f).is_zero(), (lab, g)


# corner values --------------------------------------------------------------

def test_corner_value_examples():
    assert corner_value("B", 3, 2, "f4") == Fraction(-1, 4)
    assert corner_value("D", 4, 3, "f4_2") == Fraction(-1, 16)
    for n in range(4, 11):
        assert corner_value("D", n, n, "f8") == Fraction(8, n ** 3)


@pytest.mark.parametrize("t", "BD")
@pytest.mark.parametrize("n", range(4, 9))
def test_corner_values_match_evaluation(t, n):
    for lab in closed_form_labels(t, n):
        if lab in ("obstruction6",):
            continue
        f = closed_form_invariant(t, n, lab)
        for k in range(1, n + 1):
            assert evaluate_at_corner(f, t, n, k) == corner_value(t, n, k, lab)


@pytest.mark.parametrize("n", range(3, 11))
def test_b_f4_sign_pattern(n):
    for k in range(1, n + 1):
        v = corner_value("B", n, k, "f4")
        assert (v == 0) == (3 * (k - 1) == n - 1)
        assert sign(v) == sign(Fraction(n - 1) - 3 * (k - 1))


@pytest.mark.parametrize("n", range(2, 9))
def test_a_f3_sign_pattern(n):
    f3 = closed_form_invariant("A", n, "f3")
    for k in range(1, n + 1):
        v = evaluate_at_corner(f3, "A", n, k)
        expected = sign(Fraction(n + 1, 2) - k)
        assert (sign(v) if not is_zero(to_mpf(v)) else 0) == expected


@pytest.mark.parametrize("n", range(4, 9))
def test_a_f4_roots_straddle(n):
    al, be = a_roots(n, "f4")
    assert 1 < al < MP.mpf(n + 1) / 2 < be < n
    f4 = closed_form_invariant("A", n, "f4")
    for k in range(1, n + 1):
        v = to_mpf(evaluate_at_corner(f4, "A", n, k))
        assert abs(v - to_mpf(corner_value("A", n, k, "f4"))) < MP.mpf(10) ** -30
