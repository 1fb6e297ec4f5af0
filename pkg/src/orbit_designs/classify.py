"""Tight designs among the corner-orbit unions X(G, J), and the known tables of them.

The search runs over J, over the ways of placing the orbits of J on
concentric spheres, and over the strengths t whose Fisher-type bound equals
|X|.  For each candidate the invariant conditions

    sum_k w_k r_k^(2j+l) N_k phi(v_k) = 0

are solved with sympy after fixing one weight and one radius (both sides
are homogeneous).  One-parameter families keep the last radius free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import sympy as sp
from sympy.utilities.iterables import multiset_partitions

from .designs import (WeightedDesign, corner_design, fisher_bound, is_tight, max_strength,
                      strength_direct, strength_full, strength_invariant)
from .groups import MIN_RANK, build_group, corner_orbit_size, corner_vectors, molien_dims
from .invariants import invariant_harm_basis
from .scalar import exact_sqrt, from_sympy, sqrt_rational, to_sympy

# parameter values tried, in order, for one-parameter families
PARAM_GRID = tuple(Fraction(x) for x in
                   ("2", "3", "3/2", "1/2", "5/2", "1/3", "4", "2/3", "5", "3/4", "5/4", "10"))
N_SAMPLES = 3


# ---------------------------------------------------------------------------------
# records

@dataclass
class DesignFamily:
    """A set X(G, J) with radii and weights, possibly depending on one parameter.

    ``radius2`` and ``weights`` map corner indices to sympy expressions in
    ``param`` (a radius symbol) or to constants.
    """

    dynkin_type: str
    n: int
    t: int
    J: tuple
    spheres: tuple
    radius2: dict
    weights: dict
    param: object = None
    samples: tuple = ()
    note: str = ""

    @property
    def p(self) -> int:
        return len(self.spheres)

    @property
    def size(self) -> int:
        return sum(corner_orbit_size(self.dynkin_type, self.n, k) for k in self.J)

    @property
    def key(self) -> tuple:
        return (self.dynkin_type, self.n, self.t, self.J, self.p)

    def is_valid(self, value) -> bool:
        if self.param is None:
            return True
        return _valid_at(self, sp.Rational(value.numerator, value.denominator)
                         if isinstance(value, Fraction) else sp.nsimplify(value))

    def values(self, value=None):
        """Exact (radius2, weights) dicts, with the parameter set to ``value``."""
        sub = {}
        if self.param is not None:
            if value is None:
                raise ValueError(f"family has a free parameter {self.param}; pass a value")
            value = Fraction(value)
            if not self.is_valid(value):
                raise ValueError(f"{self.param} = {value} is outside the family's range")
            sub = {self.param: sp.Rational(value.numerator, value.denominator)}
        r2 = {k: _to_scalar(sp.sympify(e).subs(sub)) for k, e in self.radius2.items()}
        w = {k: _to_scalar(sp.sympify(e).subs(sub)) for k, e in self.weights.items()}
        return r2, w

    def design(self, value=None) -> WeightedDesign:
        G = build_group(self.dynkin_type, self.n)
        r2, w = self.values(value)
        return corner_design(G, r2, w, label=self.label)

    def sample_values(self, count: int = N_SAMPLES) -> list:
        """Parameter values to check: None for a rigid row, else ``count`` valid samples."""
        if self.param is None:
            return [None]
        if self.samples:
            return list(self.samples[:count])
        out = [v for v in PARAM_GRID if self.is_valid(v)]
        return out[:count]

    @property
    def label(self) -> str:
        return f"X({self.dynkin_type}{self.n},{{{','.join(map(str, self.J))}}})"

    def describe(self) -> dict:
        return {
            "type": self.dynkin_type, "n": self.n, "t": self.t, "J": list(self.J),
            "spheres": [list(c) for c in self.spheres], "size": self.size,
            "radius2": {str(k): str(sp.sympify(e)) for k, e in sorted(self.radius2.items())},
            "weights": {str(k): str(sp.sympify(e)) for k, e in sorted(self.weights.items())},
            "parameter": None if self.param is None else str(self.param),
            "note": self.note,
        }


def _to_scalar(expr):
    expr = sp.radsimp(sp.nsimplify(sp.simplify(expr)))
    return from_sympy(expr)


def _valid_at(fam: DesignFamily, value) -> bool:
    sub = {fam.param: value} if fam.param is not None else {}
    nums = {}
    for k in fam.J:
        r2 = sp.N(sp.sympify(fam.radius2[k]).subs(sub), 40)
        w = sp.N(sp.sympify(fam.weights[k]).subs(sub), 40)
        if not (r2.is_real and w.is_real) or r2 <= 0 or w <= 0:
            return False
        nums[k] = r2
    radii = []
    for c in fam.spheres:
        r = nums[c[0]]
        if any(abs(r - nums[k]) > 1e-25 for k in c):
            return False
        radii.append(r)
    return all(abs(a - b) > 1e-20 for a, b in combinations(radii, 2))


# ---------------------------------------------------------------------------------
# the search

def _inv_norm_power(dynkin_type: str, n: int, cv, l: int):
    """1 / |v|^l for the scaled corner vector, as a sympy number."""
    nu = cv.norm2
    half = to_sympy(nu ** (l // 2))
    if l % 2 == 0:
        return 1 / half
    root = exact_sqrt(nu)
    if root is not None:
        return 1 / (half * to_sympy(root))
    if isinstance(nu, (int, Fraction)):
        return 1 / (half * sp.sqrt(to_sympy(nu)))
    if dynkin_type == "A":
        m = cv.k * (n + 1 - cv.k)
        q = 1 + sqrt_rational(n + 1)
        if q * q * m != nu:
            raise AssertionError("unexpected A_n corner norm")
        return 1 / (half * to_sympy(q) * sp.sqrt(m))
    raise ValueError("corner norm has no usable square root")


def corner_coefficients(dynkin_type: str, n: int, l: int, J) -> dict:
    """{k: [N_k phi_i(v_k) for phi_i in the invariant basis]} at unit corner vectors."""
    G = build_group(dynkin_type, n)
    B = invariant_harm_basis(G, l)
    cvs = {c.k: c for c in corner_vectors(dynkin_type, n)}
    out = {}
    for k in J:
        cv = cvs[k]
        scale = corner_orbit_size(dynkin_type, n, k) * _inv_norm_power(dynkin_type, n, cv, l)
        out[k] = [sp.radsimp(to_sympy(v) * scale) for v in B.values(cv.scaled)]
    return out


def candidates(dynkin_type: str, n: int, t_max: int):
    """(J, spheres, t) with |X(G, J)| equal to the Fisher-type bound for p = len(spheres)."""
    t_top = min(t_max, max_strength(dynkin_type))
    for m in range(1, n + 1):
        for J in combinations(range(1, n + 1), m):
            if dynkin_type == "D" and n not in J and n - 1 not in J:
                continue
            size = sum(corner_orbit_size(dynkin_type, n, k) for k in J)
            for classes in multiset_partitions(list(J)):
                spheres = tuple(tuple(c) for c in classes)
                for t in range(1, t_top + 1):
                    if fisher_bound(n, t, len(spheres)) == size:
                        yield J, spheres, t


def design_equations(dynkin_type: str, n: int, J, spheres, t):
    """The invariant conditions as sympy expressions with w_{J[0]} = r_{sphere 0} = 1.

    Returns (equations, weight symbols, radius symbols, unknowns).
    """
    q = molien_dims(build_group(dynkin_type, n), t)
    w = {k: sp.Symbol(f"w{k}", positive=True) for k in J}
    sphere_of = {k: i for i, c in enumerate(spheres) for k in c}
    r = {i: sp.Symbol(f"r{c[0]}", positive=True) for i, c in enumerate(spheres)}
    p = len(spheres)
    eqs = []
    for l in range(1, t + 1):
        if not q[l]:
            continue
        a = corner_coefficients(dynkin_type, n, l, J)
        top = (t - l) // 2
        for i in range(q[l]):
            if top + 1 >= p:
                # the Vandermonde system in distinct r_c^2 forces each sphere's sum to vanish
                for c in spheres:
                    eqs.append(sum(w[k] * a[k][i] for k in c))
            else:
                for j in range(top + 1):
                    eqs.append(sum(w[k] * a[k][i] * r[sphere_of[k]] ** (2 * j + l) for k in J))
    k0 = J[0]
    fix = {w[k0]: 1, r[sphere_of[k0]]: 1}
    out = []
    for e in eqs:
        e = sp.expand(sp.sympify(e).subs(fix))
        if e != 0 and e not in out:
            out.append(e)
    unknowns = [w[k] for k in J if k != k0] + [r[i] for i in range(p) if i != sphere_of[k0]]
    return out, w, r, unknowns, fix


def _attempt(eqs, unknowns, d):
    params = unknowns[len(unknowns) - d:] if d else []
    solve_for = unknowns[:len(unknowns) - d]
    sols = sp.solve(eqs, solve_for, dict=True)
    if not sols:
        return "none", [], params
    if all(set(solve_for) <= set(s) for s in sols):
        return "full", sols, params
    return "partial", sols, params


def _solve_system(eqs, unknowns):
    """Solutions with as few free unknowns as possible, taken from the end of the list.

    Returns (solutions, parameters); unknowns missing from a solution are free too.
    """
    if not eqs:
        return [dict()], list(unknowns)
    d = max(0, len(unknowns) - len(eqs))
    seen = {}
    while 0 <= d <= len(unknowns) and d not in seen:
        status, sols, params = seen[d] = _attempt(eqs, unknowns, d)
        if status == "full":
            return sols, params
        if status == "partial":
            d += 1
        elif d == 0:
            return [], []
        else:
            d -= 1
    partial = [v for v in seen.values() if v[0] == "partial"]
    if partial:
        _, sols, params = min(partial, key=lambda v: len(v[2]))
        return sols, params
    return [], []


def solve_candidate(dynkin_type: str, n: int, J, spheres, t) -> tuple[list, list]:
    """(families, flagged) for one candidate; flagged holds unresolved solutions."""
    eqs, w, r, unknowns, fix = design_equations(dynkin_type, n, J, spheres, t)
    sols, params = _solve_system(eqs, unknowns)
    fams, flagged = [], []
    for sol in sols:
        full = {s: sp.sympify(sol.get(s, s)).subs(fix) for s in unknowns}
        full.update(fix)
        free = set(params) | {s for s in unknowns if s not in sol}
        if any(sp.simplify(full[r[a]] - full[r[b]]) == 0
               for a, b in combinations(range(len(spheres)), 2)):
            continue  # two spheres coincide: counted under a coarser placement
        if len(free) > 1:
            flagged.append({"J": J, "spheres": spheres, "t": t, "solution": sol})
            continue
        param = next(iter(free)) if free else None
        radius2 = {}
        weights = {}
        for i, c in enumerate(spheres):
            rad = full[r[i]]
            for k in c:
                radius2[k] = sp.radsimp(sp.simplify(rad ** 2))
        for k in J:
            weights[k] = sp.simplify(full[w[k]])
        if param is not None and param in {w[k] for k in J}:
            flagged.append({"J": J, "spheres": spheres, "t": t, "solution": sol,
                            "reason": "free weight"})
            continue
        fam = DesignFamily(dynkin_type, n, t, tuple(J), tuple(spheres), radius2, weights, param)
        if param is None:
            if not _valid_at(fam, None):
                continue
        else:
            samples = [v for v in PARAM_GRID if fam.is_valid(v)]
            if not samples:
                continue
            fam.samples = tuple(samples[:N_SAMPLES])
        if not any(_same_family(fam, other) for other in fams):
            fams.append(fam)
    return fams, flagged


def _same_family(a: DesignFamily, b: DesignFamily) -> bool:
    # different branches of the solver can return one family twice
    if a.param != b.param:
        return False
    return all(sp.simplify(a.radius2[k] - b.radius2[k]) == 0
               and sp.simplify(a.weights[k] - b.weights[k]) == 0 for k in a.J)


@dataclass
class Classification:
    dynkin_type: str
    n_max: int
    t_max: int
    families: list = field(default_factory=list)
    flagged: list = field(default_factory=list)
    candidates: int = 0

    def keys(self) -> set:
        return {f.key for f in self.families}


def classify_corner_designs(dynkin_type: str, n_max: int, t_max: int = 7,
                            n_min: int | None = None, certify: bool = True) -> Classification:
    """All tight X(G, J) for ranks up to n_max and strengths up to t_max.

    Strengths above max_strength(type) are skipped: the degree-6 (A) and
    degree-8 (B, D) obstructions rule them out for every J, R and w.
    With ``certify`` each family is re-checked with strength_invariant at
    its sample parameters (t holds, t + 1 fails, |X| meets the bound).
    """
    t = dynkin_type.upper()
    if n_max > 10:
        raise ValueError("rank cap is 10")
    out = Classification(t, n_max, t_max)
    for n in range(n_min or MIN_RANK[t], n_max + 1):
        G = build_group(t, n)
        for J, spheres, tt in candidates(t, n, t_max):
            out.candidates += 1
            fams, flagged = solve_candidate(t, n, J, spheres, tt)
            out.flagged.extend(flagged)
            for fam in fams:
                if certify:
                    for v in fam.sample_values():
                        X = fam.design(v)
                        rep = strength_invariant(X, G, tt + 1)
                        if rep.t_certified != tt or not is_tight(X, tt).tight:
                            raise AssertionError(f"{fam.label} failed certification at {v}")
                out.families.append(fam)
    return out


# ---------------------------------------------------------------------------------
# the published tables

_rho = sp.Symbol("rho", positive=True)
ANY_N = {"A": (2, 3, 4, 5, 6, 7), "B": (2, 3, 4, 5, 6, 7)}


def _row(table, T, n, t, J, spheres, r2, w, param=False, samples=(), note=""):
    return dict(table=table, type=T, n=n, t=t, J=tuple(J), spheres=tuple(map(tuple, spheres)),
                radius2=r2, weights=w, param=param, samples=samples, note=note)


def _table_rows():
    R = sp.Rational
    rho = _rho
    rows = [
        # type A table
        _row(1, "A", "any", 2, [1], [[1]], {1: 1}, {1: 1}),
        _row(1, "A", "any", 2, ["n"], [["n"]], {"n": 1}, {"n": 1}),
        _row(1, "A", 3, 3, [2], [[2]], {2: 1}, {2: 1}),
        _row(1, "A", 2, 5, [1, 2], [[1, 2]], {1: 1, 2: 1}, {1: 1, 2: 1}),
        _row(1, "A", 7, 5, [2, 6], [[2, 6]], {2: 1, 6: 1}, {2: 1, 6: 1}),
        _row(1, "A", 2, 4, [1, 2], [[1], [2]], {1: 1, 2: rho ** 2}, {1: 1, 2: 1 / rho ** 3},
             param=True),
        _row(1, "A", 4, 4, [1, 3], [[1], [3]], {1: 1, 3: R(1, 6)}, {1: 1, 3: 27}),
        _row(1, "A", 4, 4, [2, 4], [[2], [4]], {4: 1, 2: R(1, 6)}, {4: 1, 2: 27}),
        _row(1, "A", 5, 4, [1, 4], [[1], [4]], {1: 1, 4: R(8, 5)}, {1: 1, 4: R(1, 2)}),
        _row(1, "A", 5, 4, [2, 5], [[2], [5]], {5: 1, 2: R(8, 5)}, {5: 1, 2: R(1, 2)}),
        _row(1, "A", 6, 4, [1, 5], [[1], [5]], {1: 1, 5: 15}, {1: 1, 5: R(1, 81)}),
        _row(1, "A", 6, 4, [2, 6], [[2], [6]], {6: 1, 2: 15}, {6: 1, 2: R(1, 81)}),
        _row(1, "A", 3, 5, [1, 2, 3], [[1, 3], [2]], {1: 1, 3: 1, 2: rho ** 2},
             {1: 1, 3: 1, 2: R(8, 9) / rho ** 4}, param=True,
             note="weight cell printed as 9/(8 r2^4); the conditions give 8/(9 r2^4)"),
        _row(1, "A", 5, 5, [1, 3, 5], [[1, 5], [3]], {1: 1, 5: 1, 3: rho ** 2},
             {1: 1, 5: 1, 3: R(27, 25) / rho ** 4}, param=True,
             note="weight cell printed with r2; r3 is meant"),
        # type B table
        _row(2, "B", "any", 3, [1], [[1]], {1: 1}, {1: 1}),
        _row(2, "B", 2, 3, [2], [[2]], {2: 1}, {2: 1}),
        _row(2, "B", 2, 7, [1, 2], [[1, 2]], {1: 1, 2: 1}, {1: 1, 2: 1}),
        _row(2, "B", 2, 5, [1, 2], [[1], [2]], {1: 1, 2: rho ** 2}, {1: 1, 2: 1 / rho ** 4},
             param=True),
        _row(2, "B", 3, 5, [1, 3], [[1], [3]], {1: 1, 3: rho ** 2},
             {1: 1, 3: R(9, 8) / rho ** 4}, param=True,
             note="weight cell printed with r2; r3 is meant"),
        _row(2, "B", 4, 7, [1, 2, 4], [[1, 4], [2]], {1: 1, 4: 1, 2: rho ** 2},
             {1: 1, 4: 1, 2: 1 / rho ** 6}, param=True),
        _row(2, "B", 3, 7, [1, 2, 3], [[1], [2], [3]],
             {1: 1, 3: rho ** 2, 2: 2 * rho ** 2 / (5 * rho ** 2 - 3)},
             {1: 1, 3: R(27, 40) / rho ** 6,
              2: R(4, 5) / (2 * rho ** 2 / (5 * rho ** 2 - 3)) ** 3},
             param=True, samples=(Fraction(2), Fraction(3), Fraction(3, 2)),
             note="rho = r3, valid for r3^2 > 3/5 and r3 != 1"),
        # type D table, n or n-1 in J
        _row(3, "D", 8, 7, [2, 7], [[2, 7]], {2: 1, 7: 1}, {2: 1, 7: 1}),
        _row(3, "D", 8, 7, [2, 8], [[2, 8]], {2: 1, 8: 1}, {2: 1, 8: 1}),
        _row(3, "D", 6, 5, [1, 5], [[1], [5]], {1: 1, 5: rho ** 2},
             {1: 1, 5: R(9, 8) / rho ** 4}, param=True,
             note="weight cell printed with r2; r5 is meant"),
        _row(3, "D", 6, 5, [1, 6], [[1], [6]], {1: 1, 6: rho ** 2},
             {1: 1, 6: R(9, 8) / rho ** 4}, param=True,
             note="weight cell printed with r2; r6 is meant"),
        _row(3, "D", 4, 7, [1, 2, 3, 4], [[1, 3, 4], [2]], {1: 1, 3: 1, 4: 1, 2: rho ** 2},
             {1: 1, 3: 1, 4: 1, 2: 1 / rho ** 6}, param=True),
    ]
    return rows


# tight designs found by the search that the D_n table does not list
EXTRA_ROWS = (
    _row(3, "D", 4, 3, [3], [[3]], {3: 1}, {3: 1},
         note="v3 orbit of D4 (a cross-polytope); tight 3-design absent from the table"),
    _row(3, "D", 4, 3, [4], [[4]], {4: 1}, {4: 1},
         note="v4 orbit of D4 (a cross-polytope); tight 3-design absent from the table"),
)


def _resolve(row, n):
    def idx(k):
        return n if k == "n" else k

    J = tuple(sorted(idx(k) for k in row["J"]))
    spheres = tuple(tuple(idx(k) for k in c) for c in row["spheres"])
    r2 = {idx(k): sp.sympify(v) for k, v in row["radius2"].items()}
    w = {idx(k): sp.sympify(v) for k, v in row["weights"].items()}
    samples = row["samples"] or (Fraction(2), Fraction(3), Fraction(1, 2))
    fam = DesignFamily(row["type"], n, row["t"], J, spheres, r2, w,
                       _rho if row["param"] else None, samples=samples if row["param"] else (),
                       note=row["note"])
    return fam


def table_families(table: int, any_ranks=None) -> list[DesignFamily]:
    """The rows of table 1 (A), 2 (B) or 3 (D) as design families.

    Rows valid for every rank are expanded over ``any_ranks``.
    """
    out = []
    for row in _table_rows():
        if row["table"] != table:
            continue
        if row["n"] == "any":
            for n in (any_ranks or ANY_N[row["type"]]):
                out.append(_resolve(row, n))
        else:
            out.append(_resolve(row, row["n"]))
    return out


def extra_families() -> list[DesignFamily]:
    return [_resolve(row, row["n"]) for row in EXTRA_ROWS]


def expected_keys(dynkin_type: str, n_max: int, t_max: int = 7) -> set:
    """Keys the search should find: table rows plus the documented extras."""
    t = dynkin_type.upper()
    table = {"A": 1, "B": 2, "D": 3}[t]
    ranks = range(MIN_RANK[t], n_max + 1)
    fams = table_families(table, any_ranks=ranks) + [
        f for f in extra_families() if f.dynkin_type == t]
    return {f.key for f in fams if f.n <= n_max and f.t <= t_max}


@dataclass
class RowCertificate:
    family: DesignFamily
    parameter: object
    t_invariant: int
    t_full: int
    t_direct: int
    size: int
    bound: int

    @property
    def ok(self) -> bool:
        t = self.family.t
        return (self.t_invariant == self.t_full == self.t_direct == t
                and self.size == self.bound)


def certify_family(fam: DesignFamily, value=None) -> RowCertificate:
    """Strength by all three methods with t_max = t + 1, and the Fisher-type bound."""
    G = build_group(fam.dynkin_type, fam.n)
    X = fam.design(value)
    t1 = fam.t + 1
    ti = strength_invariant(X, G, t1).t_certified
    tf = strength_full(X, t1).t_certified
    td = strength_direct(X, t1).t_certified
    tr = is_tight(X, fam.t)
    return RowCertificate(fam, value, ti, tf, td, tr.size, tr.bound)


__all__ = [
    "DesignFamily", "Classification", "classify_corner_designs", "candidates",
    "design_equations", "solve_candidate", "corner_coefficients", "table_families",
    "extra_families", "expected_keys", "certify_family", "RowCertificate", "EXTRA_ROWS",
    "PARAM_GRID",
]
