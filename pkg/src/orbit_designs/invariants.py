"""Invariant harmonic polynomials of the reflection groups A, B and D.

The default solver works in the monomial symmetric basis m_lambda: the
first n-1 generators of every supported group are adjacent
transpositions, so an invariant is a combination of m_lambda, and only
the Laplacian and the last generator remain to be imposed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from .groups import (ReflectionGroup, build_group, corner_orbit, corner_vectors, group_elements,
                     mat_vec, molien_dims, transpose)
from .linalg import canonical_basis, nullspace
from .poly import MultiPoly, act, evaluate, laplacian_matrix, msym
from .scalar import MP, Quad, exact_sqrt, sqrt_rational, to_mpf

SAMPLE_RANGE = 1000
STALL_POINTS = 4


class MolienMismatchError(RuntimeError):
    """The computed invariant space disagrees with the Molien series."""


@lru_cache(maxsize=None)
def partitions(l: int, max_parts: int, max_part: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Partitions of l into at most max_parts parts, lexicographically descending."""
    if max_part is None:
        max_part = l
    if l == 0:
        return ((),)
    if max_parts == 0:
        return ()
    out = []
    for first in range(min(l, max_part), 0, -1):
        for rest in partitions(l - first, max_parts - 1, first):
            out.append((first,) + rest)
    return tuple(out)


def msym_values(n: int, l: int, x) -> dict:
    """{lambda: m_lambda(x)} for every partition of l with at most n parts.

    Expands prod_i (1 + sum_e x_i^e z_e) truncated at total degree l; the
    coefficient of the monomial in z labelled by lambda is m_lambda(x).
    """
    states = {(): Fraction(1)}
    for xi in x:
        pw = [Fraction(1)]
        for _ in range(l):
            pw.append(pw[-1] * xi)
        new = dict(states)
        for st, val in states.items():
            rem = l - sum(st)
            for e in range(1, rem + 1):
                nst = tuple(sorted(st + (e,), reverse=True))
                new[nst] = new.get(nst, 0) + val * pw[e]
        states = new
    return {lam: states.get(lam, Fraction(0)) for lam in partitions(l, n)}


def sym_laplacian_rows(n: int, l: int):
    """Matrix of the Laplacian from span{m_lambda : lambda |- l} to degree l-2."""
    src = partitions(l, n)
    dst = partitions(l - 2, n) if l >= 2 else ()
    col = {lam: j for j, lam in enumerate(src)}
    rows = []
    for mu in dst:
        row = [Fraction(0)] * len(src)
        m = list(mu) + [0] * (n - len(mu))
        for i in range(n):
            beta = list(m)
            beta[i] += 2
            lam = tuple(sorted((b for b in beta if b), reverse=True))
            if lam in col:
                row[col[lam]] += beta[i] * (beta[i] - 1)
        rows.append(row)
    return rows


def sym_expand(n: int, lams, coeffs) -> MultiPoly:
    out = MultiPoly(n)
    for lam, c in zip(lams, coeffs):
        if c != 0:
            out = out + msym(n, lam) * c
    return out


@dataclass
class InvariantBasis:
    """Basis of Harm_l(R^n)^G.

    Each basis element is stored as coefficients over m_lambda (``lams``);
    ``polys`` expands them lazily.
    """

    group: ReflectionGroup
    degree: int
    lams: tuple
    coeffs: list
    _polys: list | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.coeffs)

    @property
    def polys(self) -> list[MultiPoly]:
        if self._polys is None:
            self._polys = [sym_expand(self.group.n, self.lams, c) for c in self.coeffs]
        return self._polys

    def values(self, x) -> list:
        """[phi(x) for phi in the basis], without expanding the polynomials."""
        if not self.coeffs:
            return []
        mv = msym_values(self.group.n, self.degree, x)
        vals = [mv[lam] for lam in self.lams]
        out = []
        for c in self.coeffs:
            total = Fraction(0)
            for a, b in zip(c, vals):
                if a != 0:
                    total = total + a * b
            out.append(total)
        return out


def _sample_points(n: int, seed: int):
    rng = random.Random(seed)
    while True:
        yield tuple(Fraction(rng.randint(-SAMPLE_RANGE, SAMPLE_RANGE)) for _ in range(n))


def _reduce(row, basis):
    """Reduce ``row`` against echelon rows [(pivot, row with 1 at pivot)]."""
    row = list(row)
    for p, b in basis:
        c = row[p]
        if c != 0:
            row = [x - c * y if y != 0 else x for x, y in zip(row, b)]
    return row


def _add_row(row, basis) -> bool:
    row = _reduce(row, basis)
    p = next((i for i, x in enumerate(row) if x != 0), None)
    if p is None:
        return False
    inv = row[p].inverse() if isinstance(row[p], Quad) else 1 / Fraction(row[p])
    basis.append((p, [x * inv for x in row]))
    return True


def _symmetric_method(G: ReflectionGroup, l: int):
    n = G.n
    lams = partitions(l, n)
    basis = []
    for row in sym_laplacian_rows(n, l):
        _add_row(row, basis)
    gT = transpose(G.generators[-1])
    stall = 0
    pts = _sample_points(n, 7919 * n + l)
    while stall < STALL_POINTS and len(basis) < len(lams):
        x = next(pts)
        a = msym_values(n, l, mat_vec(gT, x))
        b = msym_values(n, l, x)
        if _add_row([a[lam] - b[lam] for lam in lams], basis):
            stall = 0
        else:
            stall += 1
    rows = [r for _, r in basis]
    null = nullspace(rows, len(lams))
    return lams, canonical_basis(null, len(lams))


def _generators_method(G: ReflectionGroup, l: int):
    """Oracle: solve the full system on Hom_l with the explicit group action."""
    n = G.n
    rows, exps = laplacian_matrix(n, l)
    idx = {e: i for i, e in enumerate(exps)}
    for g in G.generators:
        images = [act(g, MultiPoly.monomial(n, e)) for e in exps]
        for e in exps:
            row = [img.coeff(e) for img in images]
            row[idx[e]] -= 1
            rows.append(row)
    null = nullspace(rows, len(exps))
    return exps, canonical_basis(null, len(exps))


_BASIS_CACHE: dict = {}


def invariant_harm_basis(G: ReflectionGroup, l: int, method: str = "symmetric",
                         check_molien: bool = True) -> InvariantBasis:
    """Basis of the G-invariant harmonic polynomials of degree l.

    ``method="symmetric"`` (default) solves over m_lambda; ``"generators"``
    solves the full monomial system and is meant as an oracle for small cases.
    """
    if l < 0:
        raise ValueError("degree must be >= 0")
    key = (G.dynkin_type, G.n, l, method)
    if key in _BASIS_CACHE:
        return _BASIS_CACHE[key]
    if method == "symmetric":
        lams, coeffs = _symmetric_method(G, l)
        result = InvariantBasis(G, l, lams, coeffs)
    elif method == "generators":
        exps, coeffs = _generators_method(G, l)
        polys = [MultiPoly(G.n, dict(zip(exps, c))) for c in coeffs]
        lams = partitions(l, G.n)
        sym_coeffs = [[p.coeff(tuple(lam) + (0,) * (G.n - len(lam))) for lam in lams]
                      for p in polys]
        result = InvariantBasis(G, l, lams, sym_coeffs, polys)
    else:
        raise ValueError(f"unknown method {method!r}")
    if check_molien:
        q = molien_dims(G, l)[l]
        if len(result) != q:
            raise MolienMismatchError(
                f"{G.name}, degree {l}: found {len(result)} invariants, Molien gives {q}")
    _BASIS_CACHE[key] = result
    return result


def reynolds(G: ReflectionGroup, f: MultiPoly, cap: int = 10 ** 6) -> MultiPoly:
    """Average of f over all elements of G."""
    elems = group_elements(G, cap)
    total = MultiPoly(f.n)
    for g in elems:
        total = total + act(g, f, check=False)
    return total * Fraction(1, len(elems))


# closed forms ---------------------------------------------------------------

def _s(n):
    return sqrt_rational(n + 1)


def h_poly(n: int, label: str) -> MultiPoly:
    """The S_n-invariant harmonic helpers h_{4,i} and h_{5,i}."""
    F = Fraction
    m = lambda *e: msym(n, e)  # noqa: E731
    need = {"h4_1": 3, "h4_2": 4, "h4_3": 3, "h5_1": 3, "h5_2": 2, "h5_3": 4, "h5_4": 5}
    if label not in need:
        raise ValueError(f"unknown helper {label!r}")
    if n < need[label]:
        raise ValueError(f"{label} needs n >= {need[label]}")
    if label == "h4_1":
        # the printed coefficient 6/(n-2) is not harmonic; 6/(n-1) is
        return m(4) - m(2, 2) * F(6, n - 1)
    if label == "h4_2":
        return m(1, 1, 1, 1)
    if label == "h4_3":
        return m(3, 1) - m(2, 1, 1) * F(6, n - 2)
    if label == "h5_1":
        return m(5) - m(3, 2) * F(10, n - 1) + m(2, 2, 1) * F(30, (n - 1) * (n - 2))
    if label == "h5_2":
        return m(5) - m(3, 2) * F(10, n - 1) + m(4, 1) * F(5, n - 1)
    if label == "h5_3":
        return m(3, 1, 1) - m(2, 1, 1, 1) * F(9, n - 3)
    return m(1, 1, 1, 1, 1)


def _a_f3(n: int) -> MultiPoly:
    F = Fraction
    if n == 2:
        return MultiPoly(2, {(3, 0): 1, (2, 1): -3, (1, 2): -3, (0, 3): 1})
    if n == 3:
        return msym(3, (3,)) - msym(3, (2, 1)) * F(3, 2) - msym(3, (1, 1, 1)) * F(3, 4)
    c3 = (2 - _s(n)) * 6 / ((n - 1) * (n - 3))
    return msym(n, (3,)) - msym(n, (2, 1)) * F(3, n - 1) + msym(n, (1, 1, 1)) * c3


def _a_f4(n: int) -> MultiPoly:
    if n == 3:
        return h_poly(3, "h4_1") - h_poly(3, "h4_3") * Fraction(20, 13)
    s = _s(n)
    den = n ** 3 - 2 * n ** 2 - 15 * n - 16
    c2 = (s * 4 + (n * n - 5 * n - 12)) * 24 * (n + 2) / ((n - 1) * (n - 2) * den)
    c3 = -(-(n - 1) * s + (n * n - 2 * n - 7)) * 4 * (n + 2) / ((n - 1) * den)
    return h_poly(n, "h4_1") + h_poly(n, "h4_2") * c2 + h_poly(n, "h4_3") * c3


def _a_f5(n: int) -> MultiPoly:
    if n == 4:
        s5 = sqrt_rational(5)
        return (h_poly(4, "h5_1") + h_poly(4, "h5_2") * ((17 - 20 * s5) / 58)
                + h_poly(4, "h5_3") * ((s5 + 18) * 10 / 87))
    s = _s(n)
    den = 4 * n ** 3 + 3 * n ** 2 - 60 * n - 180
    c2 = -((2 * n ** 3 + 5 * n ** 2 - 21 * n - 90) - n * (n + 6) * s) / den
    c3 = ((2 * n ** 3 + 6 * n ** 2 - 32 * n - 168) + (n * n - 8 * n + 12) * s) * 20 \
        / ((n - 1) * (n - 2) * den)
    c4 = -((n * n - 11 * n - 78) + (2 * n * n - 2 * n + 12) * s) * 120 * (n + 6) \
        / ((n - 1) * (n - 2) * (n - 3) * den)
    return (h_poly(n, "h5_1") + h_poly(n, "h5_2") * c2 + h_poly(n, "h5_3") * c3
            + h_poly(n, "h5_4") * c4)


def _bd_f4(n):
    return msym(n, (4,)) - msym(n, (2, 2)) * Fraction(6, n - 1)


def _bd_f6(n):
    return (msym(n, (6,)) - msym(n, (4, 2)) * Fraction(15, n - 1)
            + msym(n, (2, 2, 2)) * Fraction(180, (n - 1) * (n - 2)))


def _bd_f8(n):
    return (msym(n, (8,)) - msym(n, (6, 2)) * Fraction(28, n - 1)
            + msym(n, (4, 4)) * Fraction(70, n - 1))


def _product(n):
    return MultiPoly.monomial(n, [1] * n)


def obstruction6(n: int) -> MultiPoly:
    return msym(n, (5, 1)) - msym(n, (3, 3)) * Fraction(10, 3)


CLOSED_FORMS = {
    ("A", "f3"): (2, _a_f3),
    ("A", "f4"): (3, _a_f4),
    ("A", "f5"): (4, _a_f5),
    ("A", "obstruction6"): (2, obstruction6),
    ("B", "f4"): (2, _bd_f4),
    ("B", "f6"): (3, _bd_f6),
    ("B", "f8"): (2, _bd_f8),
    ("D", "f4"): (4, _bd_f4),
    ("D", "f6"): (4, _bd_f6),
    ("D", "f8"): (4, _bd_f8),
}
SPECIAL_RANK = {("D", "f4_2"): 4, ("D", "f5"): 5, ("D", "f6_2"): 6}
H_LABELS = ("h4_1", "h4_2", "h4_3", "h5_1", "h5_2", "h5_3", "h5_4")


def closed_form_labels(dynkin_type: str, n: int) -> list[str]:
    t = dynkin_type.upper()
    out = [lab for (tt, lab), (lo, _) in CLOSED_FORMS.items() if tt == t and n >= lo]
    out += [lab for (tt, lab), r in SPECIAL_RANK.items() if tt == t and n == r]
    if t == "A":
        out += [lab for lab in H_LABELS if _h_ok(n, lab)]
    return out


def _h_ok(n, lab):
    try:
        h_poly(n, lab)
        return True
    except ValueError:
        return False


def closed_form_invariant(dynkin_type: str, n: int, label: str) -> MultiPoly:
    """The explicit invariant harmonic polynomials listed for A_n, B_n and D_n."""
    t = dynkin_type.upper()
    if t == "A" and label in H_LABELS:
        return h_poly(n, label)
    if (t, label) in SPECIAL_RANK:
        if n != SPECIAL_RANK[(t, label)]:
            raise ValueError(f"{label} is only defined for {t}{SPECIAL_RANK[(t, label)]}")
        return _product(n)
    if (t, label) not in CLOSED_FORMS:
        raise ValueError(f"no closed form {label!r} for type {t}")
    lo, fn = CLOSED_FORMS[(t, label)]
    if n < lo:
        raise ValueError(f"{label} for type {t} needs n >= {lo}")
    return fn(n)


# corner values ----------------------------------------------------------------

def _bd_value(t, n, k, label):
    F = Fraction
    spin = t == "D" and k >= n - 1
    if label == "f4":
        return F(-2, n) if spin else F(1, k) * (1 - F(3 * (k - 1), n - 1))
    if label == "f6":
        if spin:
            return F(16, n * n)
        return F(1, k * k) * (1 - F(15 * (k - 1), n - 1) + F(30 * (k - 1) * (k - 2), (n - 1) * (n - 2)))
    if label == "f8":
        return F(8, n ** 3) if spin else F(1, k ** 3) * (1 + F(7 * (k - 1), n - 1))
    if label == "f4_2":
        return {3: F(-1, 16), 4: F(1, 16)}.get(k, F(0))
    if label == "f6_2":
        return {5: F(-1, 216), 6: F(1, 216)}.get(k, F(0))
    if label == "f5":
        v = sqrt_rational(5) / 125
        return {4: -v, 5: v}.get(k, F(0))
    raise ValueError(f"no corner value formula for {label!r}")


def a_phi(n: int, label: str):
    """phi_3, phi_4, phi_5 of the A_n corner-value formulas (big float)."""
    s = MP.sqrt(n + 1)
    base = n + 2 + 2 * s
    if label == "f3":
        num = 2 * (n ** 3 + 3 * n ** 2 - 12 * n - 16 + (3 * n ** 2 - 4 * n - 16) * s)
        return num / ((n - 1) * (n - 3) * base ** MP.mpf(1.5))
    if label == "f4":
        num = 6 * (n + 1) * (n ** 5 + 7 * n ** 4 - 24 * n ** 3 - 160 * n ** 2 - 256 * n - 128
                             + 4 * (n ** 4 - 20 * n ** 2 - 48 * n - 32) * s)
        return num / ((n - 1) * (n - 2) * (n ** 3 - 2 * n ** 2 - 15 * n - 16) * base ** 2)
    if label == "f5":
        den = (n - 1) * (n - 2) * (n - 3) * (4 * n ** 3 + 3 * n ** 2 - 60 * n - 180) \
            * base ** MP.mpf(2.5)
        p1 = 2 * n ** 6 + 31 * n ** 5 + 50 * n ** 4 - 448 * n ** 3 - 2144 * n ** 2 - 3200 * n - 1536
        p2 = 11 * n ** 5 + 50 * n ** 4 - 96 * n ** 3 - 1120 * n ** 2 - 2432 * n - 1536
        return 24 * (n + 1) * (p1 + p2 * s) / den
    raise ValueError(label)


def a_roots(n: int, label: str):
    """The pair (alpha, beta) (f4) or (alpha', beta') (f5)."""
    c = MP.mpf(n + 1) / 2
    if label == "f4":
        d = MP.sqrt(3 * (n * n - 1)) / 6
    elif label == "f5":
        d = MP.sqrt(3 * (n + 1) * (2 * n - 3)) / 6
    elif label == "obstruction6":
        d = MP.sqrt(2 * (n + 1) * (n - 2)) / 4
    else:
        raise ValueError(label)
    return c - d, c + d


A3_F3_FIXTURE = {1: Fraction(729, 4), 2: Fraction(0), 3: Fraction(-729, 4)}


def _a_value(n, k, label):
    q = MP.mpf(k * (n + 1 - k))
    half = MP.mpf(n + 1) / 2
    if label == "f3":
        if n == 3:
            # the fixture is f3 at the radical-free vector, whose squared norm is 27
            return to_mpf(A3_F3_FIXTURE[k]) / MP.mpf(27) ** MP.mpf(1.5)
        return -(k - half) / MP.sqrt(q) * a_phi(n, "f3")
    if label == "f4":
        if n < 3:
            raise ValueError("f4 needs n >= 3")
        al, be = a_roots(n, "f4")
        return (k - al) * (k - be) / q * a_phi(n, "f4")
    if label == "f5":
        if n < 4:
            raise ValueError("f5 needs n >= 4")
        al, be = a_roots(n, "f5")
        return -(k - half) * (k - al) * (k - be) / q ** MP.mpf(1.5) * a_phi(n, "f5")
    raise ValueError(f"no corner value formula for {label!r}")


def corner_value(dynkin_type: str, n: int, k: int, label: str):
    """Closed-form value of a listed invariant at the unit corner vector v_k."""
    t = dynkin_type.upper()
    if not 1 <= k <= n:
        raise ValueError(f"corner index {k} out of range 1..{n}")
    if t == "A":
        return _a_value(n, k, label)
    if t in ("B", "D"):
        if (t, label) in SPECIAL_RANK and n != SPECIAL_RANK[(t, label)]:
            raise ValueError(f"{label} is only defined for {t}{SPECIAL_RANK[(t, label)]}")
        if t == "B" and label not in ("f4", "f6", "f8"):
            raise ValueError(f"no corner value formula for {label!r} in type B")
        return _bd_value(t, n, k, label)
    raise ValueError(f"unsupported type {dynkin_type!r}")


def evaluate_at_corner(f: MultiPoly, dynkin_type: str, n: int, k: int):
    """f(v_k) for a homogeneous f, via the radical-free scaled corner vector.

    Exact when the result lies in the scalar field, big float otherwise.
    """
    cv = corner_vectors(dynkin_type, n)[k - 1]
    val = evaluate(f, cv.scaled)
    d = f.degree()
    scale = cv.norm2 ** (d // 2)
    if d % 2 == 0:
        return val / scale
    root = exact_sqrt(cv.norm2)
    if root is None and isinstance(cv.norm2, Fraction) and all(
            isinstance(x, Fraction) for x in cv.scaled) and isinstance(val, Fraction):
        root = sqrt_rational(cv.norm2)
    if root is None:
        return to_mpf(val) / (to_mpf(scale) * MP.sqrt(to_mpf(cv.norm2)))
    return val / (scale * root)


def orbit_sum_obstruction(n: int, k: int):
    """Sum of the degree-6 obstruction polynomial over the unit orbit v_k^{A_n}, exactly."""
    G = build_group("A", n)
    f = obstruction6(n)
    orb = corner_orbit(G, k)
    total = Fraction(0)
    for x in orb.points:
        total = total + evaluate(f, x)
    return total / orb.norm2 ** 3


def obstruction_parts(n: int, k: int):
    """(g1(n,k), F(k)) of the factorization of the A_n orbit sum, exact in Q(sqrt(n+1))."""
    s = _s(n)
    base = s * 2 + (n + 2)
    g1 = Fraction(n * (n + 1) * comb(n - 1, k - 1), 3 * k ** 3 * (n + 1 - k) ** 3) / base ** 3
    g2 = ((6 * n + 12) * s + (n * n + 11 * n + 12)) * 5
    g3 = ((15 * n + 30) * s + (2 * n * n + 28 * n + 30)) * ((n + 1) ** 2 * (n + 2))
    F = g2 * (k * (k - n - 1) * (4 * k * k - 4 * (n + 1) * k + n * n + 5 * n + 4)) + g3
    return g1, F


__all__ = [
    "InvariantBasis", "MolienMismatchError", "invariant_harm_basis", "reynolds",
    "closed_form_invariant", "closed_form_labels", "corner_value", "evaluate_at_corner",
    "partitions", "msym_values", "sym_laplacian_rows", "obstruction6", "obstruction_parts",
    "orbit_sum_obstruction", "a_phi", "a_roots", "h_poly", "A3_F3_FIXTURE",
]
