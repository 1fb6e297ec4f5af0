import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbit_designs.poly import MultiPoly
from orbit_designs.scalar import MP, to_mpf
from orbit_designs.xu import (RadialWeight, XuConsistencyError, XuFormula, XuSolveError,
                              build_points, condition_ranges, dihedral_reduce, gauss_nodes,
                              is_dihedral_invariant, reconstruct, solve_moment_system,
                              v_poly, verify_conditions, verify_degree, weight_by_name)

F = Fraction
GAUSS, DISK = RadialWeight.gaussian(), RadialWeight.unit_disk()
EPS = MP.mpf(10) ** -40


def n2():
    return XuFormula("odd", 2, (F(1, 2),), (F(1),))


# construction ---------------------------------------------------------------

def test_build_points_n2():
    pts = build_points(n2())
    assert len(pts) == 4
    for (x, y), w in pts:
        assert abs(w - MP.pi / 4) < EPS
    angles = sorted(MP.atan2(y, x) % (2 * MP.pi) for (x, y), _ in pts)
    for a, b in zip(angles, [0, MP.pi / 2, MP.pi, 3 * MP.pi / 2]):
        assert abs(a - b) < EPS
    assert abs(sum(w for _, w in pts) - MP.pi) < EPS


def test_centre_point_and_angle_counts():
    F3 = XuFormula("odd", 3, (F(1, 4),), (MP.sqrt(2),), MP.pi / 2)
    pts = build_points(F3)
    assert pts[0] == ((0, 0), MP.pi / 2)
    assert len(pts) == 1 + 6
    E = XuFormula("even", 2, (F(1, 2), F(1, 4)), (F(1), F(2)))
    assert E.m == 1 and E.angles == 3 and len(build_points(E)) == 6


def test_sigma_selectors():
    F4 = XuFormula("odd", 4, (F(1), F(1)), (F(1), F(2)))
    # m = 2: sigma_i = 0 iff m + i even
    assert F4.sigma == (1, 0)


def test_formula_validation():
    with pytest.raises(ValueError):
        XuFormula("odd", 3, (F(1),), (F(1),))
    with pytest.raises(ValueError):
        XuFormula("odd", 2, (F(1),), (F(1),), F(1))
    with pytest.raises(ValueError):
        XuFormula("weird", 2, (F(1),), (F(1),))


def test_json_roundtrip():
    F3 = XuFormula("odd", 3, (F(1, 4),), (MP.sqrt(2),), MP.pi / 2)
    G3 = XuFormula.from_json(F3.to_json())
    assert G3.lam == F3.lam and abs(G3.r[0] - F3.r[0]) < EPS


def test_weights():
    assert GAUSS.mu(3) == 3
    assert DISK.mu(2) == F(1, 6)
    C = RadialWeight.custom([1, 2, 3])
    assert C.mu(2) == 3
    with pytest.raises(ValueError):
        C.mu(5)
    assert weight_by_name("unit_disk").mu(0) == F(1, 2)


# conditions -----------------------------------------------------------------

def test_conditions_n2():
    rep = verify_conditions(n2(), GAUSS)
    assert rep.passed and all(c.value == 0 for c in rep.conditions)
    assert not [c for c in rep.conditions if c.kind == "alternating"]


def test_perturbed_radius_residual():
    bad = XuFormula("odd", 2, (F(1, 2),), (F(11, 10),))
    rep = verify_conditions(bad, GAUSS)
    (c,) = rep.failing()
    assert (c.kind, c.j) == ("moment", 1)
    assert c.value == F(1, 2) * (F(121, 100) - 1)


def test_alternating_violation_is_reported():
    # moments of the Gaussian met by the two-point Gauss rule; alternating j=3 not
    nodes, weights = gauss_nodes([GAUSS.mu(j) for j in range(6)], 2)
    Fm = XuFormula("odd", 4, tuple(weights), tuple(MP.sqrt(s) for s in nodes))
    rep = verify_conditions(Fm, GAUSS)
    assert [(c.kind, c.j) for c in rep.failing()] == [("alternating", 3)]


def test_condition_ranges():
    mom, alt, e = condition_ranges("odd", 6)
    assert list(mom) == list(range(6)) and list(alt) == [4, 5] and e(4) == 8
    mom, alt, e = condition_ranges("even", 5)
    assert list(mom) == list(range(6)) and list(alt) == [3, 4] and e(3) == 7


# solving --------------------------------------------------------------------

def test_solve_gaussian_n2():
    S = solve_moment_system(GAUSS, 2)
    assert abs(S.lam[0] - MP.mpf(1) / 2) < EPS and abs(S.r[0] - 1) < EPS


def test_solve_unit_disk_n2():
    S = solve_moment_system(DISK, 2)
    assert abs(S.lam[0] - MP.mpf(1) / 2) < EPS and abs(S.r[0] ** 2 - MP.mpf(1) / 2) < EPS


@pytest.mark.parametrize("W", [GAUSS, DISK], ids=["gaussian", "unit_disk"])
def test_solve_n3_closed_form(W):
    # one circle plus the centre: s = mu2/mu1, lambda1 = mu1^2/mu2, lambda0 = 2 pi (mu0 - lambda1)
    mu = [to_mpf(W.mu(j)) for j in range(3)]
    S = solve_moment_system(W, 3)
    lam1 = mu[1] ** 2 / mu[2]
    assert abs(S.r[0] ** 2 - mu[2] / mu[1]) < EPS
    assert abs(S.lam[0] - lam1) < EPS
    assert abs(S.lam0 - 2 * MP.pi * (mu[0] - lam1)) < EPS


@pytest.mark.parametrize("W", [GAUSS, DISK], ids=["gaussian", "unit_disk"])
def test_solve_even_n2_against_direct_root_finding(W):
    mu = [to_mpf(W.mu(j)) for j in range(3)]

    def eqs(a, b, s, t):
        return [a + b - mu[0], a * s + b * t - mu[1], a * s ** 2 + b * t ** 2 - mu[2],
                a * s ** MP.mpf(1.5) - b * t ** MP.mpf(1.5)]

    S = solve_moment_system(W, 2, "even")
    a, b, s, t = MP.findroot(eqs, (S.lam[0] * MP.mpf(1.01), S.lam[1] * MP.mpf(0.99),
                                   S.r[0] ** 2 * MP.mpf(1.02), S.r[1] ** 2 * MP.mpf(0.98)))
    assert abs(a - S.lam[0]) < MP.mpf(10) ** -30 and abs(t - S.r[1] ** 2) < MP.mpf(10) ** -30
    assert S.degree == 4 and verify_degree(S, W, 4).passed


def test_gauss_nodes_match_laguerre():
    x, w = np.polynomial.laguerre.laggauss(3)
    nodes, weights = gauss_nodes([GAUSS.mu(j) for j in range(8)], 3)
    # the measure in s = r^2 is exp(-s)/2 ds
    assert np.allclose([float(v) for v in nodes], x, atol=1e-13)
    assert np.allclose([float(v) for v in weights], w / 2, atol=1e-13)


def test_radau_nodes_have_zero():
    nodes, weights = gauss_nodes([DISK.mu(j) for j in range(8)], 2, fixed_zero=True)
    assert abs(nodes[0]) < EPS
    for j in range(5):
        assert abs(MP.fsum(w * s ** j for s, w in zip(nodes, weights)) - to_mpf(DISK.mu(j))) < EPS


UNIQUE = [("odd", 4), ("odd", 5), ("odd", 6), ("even", 3), ("even", 5)]


@pytest.mark.parametrize("W", [GAUSS, DISK], ids=["gaussian", "unit_disk"])
@pytest.mark.parametrize("family,n", UNIQUE)
def test_overdetermined_cases_have_no_solution(W, family, n):
    """The moment equations alone force a Gauss (or Radau) rule; it breaks an alternating condition."""
    from orbit_designs.xu import _layout
    m, c, K, centre, _ = _layout(family, n)
    moments, alternating, _ = condition_ranges(family, n)
    # as many moment equations as unknowns: the rule is unique
    assert len(moments) == 2 * c + centre
    nodes, weights = gauss_nodes([W.mu(j) for j in range(2 * c + 4)], c, fixed_zero=centre)
    lam0 = None
    if centre:
        lam0 = weights[0] * 2 * MP.pi
        nodes, weights = nodes[1:], weights[1:]
    for perm in itertools.permutations(range(c)):
        cand = XuFormula(family, n, tuple(weights[i] for i in perm),
                         tuple(MP.sqrt(nodes[i]) for i in perm), lam0)
        rep = verify_conditions(cand, W)
        failing = rep.failing()
        assert failing and all(f.kind == "alternating" for f in failing)
    with pytest.raises(XuSolveError):
        solve_moment_system(W, n, family)


@pytest.mark.parametrize("n", [4, 6])
def test_even_family_with_slack_is_not_solved(n):
    with pytest.raises(XuSolveError):
        solve_moment_system(GAUSS, n, "even")


# degree checks --------------------------------------------------------------

def test_degree_n2():
    assert verify_degree(n2(), GAUSS, 3).passed
    rep = verify_degree(n2(), GAUSS, 4)
    assert not rep.passed
    fail = {(a, b): r for a, b, r, _ in rep.failing()}
    # formula gives pi/2 on x^4, the integral is mu(2) * 3pi/4 = 3pi/4
    assert abs(fail[(4, 0)] - (MP.pi / 2 - 3 * MP.pi / 4)) < EPS


def test_degree_zero_is_total_weight():
    assert verify_degree(n2(), GAUSS, 0).passed
    off = XuFormula("odd", 2, (F(3, 5),), (F(1),))
    assert not verify_degree(off, GAUSS, 0).passed


def test_odd_monomials_vanish():
    S = solve_moment_system(GAUSS, 3)
    rep = verify_degree(S, GAUSS, 7)
    for a, b, r, _ in rep.brute:
        if (a + b) % 2:
            assert abs(r) < EPS


def test_reduced_check_is_smaller():
    S = solve_moment_system(GAUSS, 3)
    for t in (3, 5, 9):
        rep = verify_degree(S, GAUSS, t)
        assert rep.reduced_count < rep.brute_count


def test_inconsistent_checks_raise(monkeypatch):
    import orbit_designs.xu as xu
    monkeypatch.setattr(xu, "invariant_integral", lambda W, K, p, q: MP.mpf(1234))
    with pytest.raises(XuConsistencyError):
        xu.verify_degree(n2(), GAUSS, 2)


@given(st.integers(0, 10 ** 6))
def test_conditions_iff_degree_on_perturbations(seed):
    rng = random.Random(seed)
    W = rng.choice([GAUSS, DISK])
    n, fam = rng.choice([(2, "odd"), (3, "odd"), (2, "even")])
    S = solve_moment_system(W, n, fam)
    lam = list(S.lam)
    r = list(S.r)
    i = rng.randrange(len(lam))
    if rng.random() < 0.5:
        lam[i] = lam[i] * (1 + MP.mpf(rng.uniform(-0.2, 0.2)))
    else:
        r[i] = r[i] * (1 + MP.mpf(rng.uniform(-0.2, 0.2)))
    P = XuFormula(fam, n, tuple(lam), tuple(r), S.lam0)
    assert verify_conditions(P, W).passed == verify_degree(P, W, P.degree).passed


# dihedral reduction ---------------------------------------------------------

def test_reduce_examples():
    x = MultiPoly.variable(2, 0)
    y = MultiPoly.variable(2, 1)
    assert dihedral_reduce(x ** 2 + y ** 2, 5) == {(1, 0): 1}
    assert dihedral_reduce(x ** 4 - 6 * x ** 2 * y ** 2 + y ** 4, 4) == {(0, 1): 1}
    # Re((x+iy)^4) expanded by hand
    re4 = x ** 4 - 6 * x ** 2 * y ** 2 + y ** 4
    f = (x ** 2 + y ** 2) ** 3 + re4 * (x ** 2 + y ** 2) * 3
    assert dihedral_reduce(f, 4) == {(3, 0): 1, (1, 1): 3}


def test_reduce_rejects_non_invariant():
    with pytest.raises(ValueError):
        dihedral_reduce(MultiPoly.variable(2, 0), 4)
    assert not is_dihedral_invariant(MultiPoly.variable(2, 1), 3)


def test_v_poly_is_real_part():
    for ell in (3, 5, 7):
        z = complex(0.3, -1.7) ** ell
        assert abs(float(to_mpf(v_poly(ell)((F(3, 10), F(-17, 10))))) - z.real) < 1e-9


@given(st.sampled_from([3, 4, 6, 8, 5]),
       st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 2)),
                       st.fractions(min_value=-5, max_value=5, max_denominator=5),
                       min_size=1, max_size=4))
def test_reduce_inverts_reconstruct(ell, coeffs):
    coeffs = {k: v for k, v in coeffs.items() if v != 0}
    f = reconstruct(coeffs, ell)
    if f.is_zero():
        return
    got = dihedral_reduce(f, ell)
    assert reconstruct(got, ell) == f
    # u and v are algebraically independent, so the expansion is unique
    assert got == coeffs
