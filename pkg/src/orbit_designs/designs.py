"""Weighted designs on concentric spheres: strength certification and size bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, prod

from .groups import (ReflectionGroup, _FloatKeys, build_group, corner_orbit, corner_orbit_size,
                     corner_vectors, mat_vec, molien_dims, orbit)
from .invariants import (closed_form_invariant, evaluate_at_corner, invariant_harm_basis,
                         obstruction_parts, orbit_sum_obstruction)
from .poly import harm_basis, hom_exponents
from .scalar import MP, SurdSum, exact_sqrt, is_exact, is_zero, sign, to_mpf, tolerance

METHODS = ("invariant", "full_harmonic", "direct_integration")


def _dot(u, v):
    total = Fraction(0)
    for a, b in zip(u, v):
        if a != 0 and b != 0:
            total = total + a * b
    return total


@dataclass(frozen=True)
class Shell:
    """Points ``lam * x`` for x in ``points``, all with weight ``weight``.

    ``scale2`` is lam**2; the base points share one squared norm, so the
    shell lies on the sphere of squared radius scale2 * |x|^2.
    """

    points: tuple
    weight: object
    scale2: object = Fraction(1)
    corner: int | None = None

    @property
    def base_norm2(self):
        return _dot(self.points[0], self.points[0])

    @property
    def radius2(self):
        return self.scale2 * self.base_norm2

    @property
    def size(self) -> int:
        return len(self.points)

    def actual_points(self):
        """Points at their true scale (exact when sqrt(scale2) is in the field)."""
        lam = exact_sqrt(self.scale2)
        if lam is None:
            lam = MP.sqrt(to_mpf(self.scale2))
        return [tuple(lam * v for v in x) for x in self.points]


def _positive(x) -> bool:
    return sign(x) > 0


def _same(a, b) -> bool:
    d = a - b
    if is_exact(d):
        return d == 0
    return is_zero(d, max(abs(to_mpf(a)), 1))


@dataclass(frozen=True)
class WeightedDesign:
    n: int
    shells: tuple
    origin_weight: object = None
    label: str = ""

    def __post_init__(self):
        for sh in self.shells:
            if not sh.points:
                raise ValueError("empty shell")
            if not _positive(sh.weight):
                raise ValueError(f"weights must be positive, got {sh.weight}")
            if not _positive(sh.scale2):
                raise ValueError(f"radii must be positive, got scale2={sh.scale2}")
            nrm = sh.base_norm2
            if not _positive(nrm):
                raise ValueError("shell contains the origin; use origin_weight")
            for x in sh.points:
                if len(x) != self.n:
                    raise ValueError(f"point {x} is not in R^{self.n}")
                if not _same(_dot(x, x), nrm):
                    raise ValueError("points of one shell must share their norm")
        if self.origin_weight is not None and not _positive(self.origin_weight):
            raise ValueError("origin weight must be positive")

    @property
    def size(self) -> int:
        return sum(sh.size for sh in self.shells) + (self.origin_weight is not None)

    @property
    def contains_origin(self) -> bool:
        return self.origin_weight is not None

    def sphere_radii2(self) -> list:
        out = []
        for sh in self.shells:
            r2 = sh.radius2
            if not any(_same(r2, s) for s in out):
                out.append(r2)
        return out

    @property
    def p(self) -> int:
        """Number of supporting spheres, counting {0} when the origin is a point."""
        return len(self.sphere_radii2()) + self.contains_origin

    def rescaled(self, c2) -> WeightedDesign:
        """All radii multiplied by sqrt(c2)."""
        return WeightedDesign(self.n, tuple(Shell(s.points, s.weight, s.scale2 * c2, s.corner)
                                            for s in self.shells), self.origin_weight, self.label)

    @classmethod
    def from_points(cls, points, weights, label: str = "") -> WeightedDesign:
        """Explicit weighted points; shells group points of equal norm and weight."""
        if len(points) != len(weights):
            raise ValueError("points and weights differ in length")
        if not points:
            raise ValueError("empty design")
        n = len(points[0])
        origin = None
        groups: list = []
        for x, w in zip(points, weights):
            x = tuple(Fraction(v) if isinstance(v, int) else v for v in x)
            w = Fraction(w) if isinstance(w, int) else w
            if len(x) != n:
                raise ValueError("points of different dimensions")
            nrm = _dot(x, x)
            if nrm == 0 or (not is_exact(nrm) and is_zero(nrm)):
                origin = w if origin is None else origin + w
                continue
            for g in groups:
                if _same(g[0], nrm) and _same(g[1], w):
                    g[2].append(x)
                    break
            else:
                groups.append([nrm, w, [x]])
        shells = tuple(Shell(tuple(g[2]), g[1]) for g in groups)
        return cls(n, shells, origin, label)


def corner_design(G: ReflectionGroup, radius2: dict, weights: dict, origin_weight=None,
                  label: str = "") -> WeightedDesign:
    """X(G, J) with J = radius2.keys(): the orbit of v_k scaled to squared radius radius2[k]."""
    if set(radius2) != set(weights):
        raise ValueError("radius and weight maps must share their corner indices")
    shells = []
    for k in sorted(radius2):
        orb = corner_orbit(G, k)
        r2 = radius2[k]
        r2 = Fraction(r2) if isinstance(r2, int) else r2
        w = Fraction(weights[k]) if isinstance(weights[k], int) else weights[k]
        shells.append(Shell(orb.points, w, r2 / orb.norm2, k))
    return WeightedDesign(G.n, tuple(shells), origin_weight, label or f"X({G.name},{sorted(radius2)})")


# residual accumulation --------------------------------------------------------

class _Acc:
    """Sum of terms coeff * sqrt(radicand): exact when all inputs are exact."""

    def __init__(self):
        self.surd = SurdSum()
        self.num = None
        self.mag = MP.mpf(0)

    def add(self, coeff, radicand=Fraction(1)):
        if coeff == 0:
            return
        if is_exact(coeff) and is_exact(radicand):
            self.surd.add(coeff, radicand)
        else:
            v = to_mpf(coeff) * MP.sqrt(to_mpf(radicand))
            self.num = v if self.num is None else self.num + v
            self.mag += abs(v)

    def bound(self, x):
        """Widen the magnitude scale when cancellation happened before add()."""
        self.mag += abs(to_mpf(x))

    def result(self):
        if self.num is None:
            ev = self.surd.exact_value()
            return (ev if ev is not None else self.surd.value()), self.surd.is_zero()
        total = self.num + self.surd.value()
        return total, abs(total) <= tolerance() * (self.mag + self.surd.magnitude)


def _lam_pow(scale2, m: int):
    """lam**m as (coefficient, radicand) with lam = sqrt(scale2)."""
    return scale2 ** (m // 2), (scale2 if m % 2 else Fraction(1))


@dataclass(frozen=True)
class Residual:
    l: int
    j: int
    index: object
    value: object
    zero: bool

    @property
    def order(self) -> int:
        return self.l + 2 * self.j


@dataclass
class StrengthReport:
    t_certified: int
    method: str
    t_max: int
    residuals: list = field(default_factory=list)

    def failing(self) -> list:
        return [r for r in self.residuals if not r.zero]


def _report(method, t_max, residuals) -> StrengthReport:
    bad = [r.order for r in residuals if not r.zero]
    t = min(bad) - 1 if bad else t_max
    return StrengthReport(t, method, t_max, residuals)


# strength: invariant harmonic polynomials --------------------------------------

def _point_lookup(points):
    if all(is_exact(v) for x in points for v in x):
        s = set(points)
        return s.__contains__
    scale = max(abs(to_mpf(v)) for x in points for v in x)
    keys = _FloatKeys(tolerance() * max(scale, 1) * 16)
    for x in points:
        keys.add(tuple(to_mpf(v) for v in x))
    return lambda y: keys.contains(tuple(to_mpf(v) for v in y))


def shell_orbits(X: WeightedDesign, G: ReflectionGroup):
    """[(shell, representative, orbit size)] after checking G-closure of every shell."""
    if G.n != X.n:
        raise ValueError(f"{G.name} does not act on R^{X.n}")
    out = []
    for idx, sh in enumerate(X.shells):
        inside = _point_lookup(sh.points)
        for x in sh.points:
            for g in G.generators:
                y = mat_vec(g, x)
                if not inside(y):
                    if _elsewhere(X, idx, y):
                        raise ValueError("weight is not constant on a G-orbit")
                    raise ValueError(f"shell {idx} is not closed under {G.name}")
        # split the shell into orbits
        remaining = list(sh.points)
        seen_lookup = set() if all(is_exact(v) for x in sh.points for v in x) else None
        while remaining:
            rep = remaining[0]
            orb = orbit(G, rep).points
            out.append((sh, rep, len(orb)))
            if seen_lookup is not None:
                orb_set = set(orb)
                remaining = [x for x in remaining if x not in orb_set]
            else:
                member = _point_lookup(orb)
                remaining = [x for x in remaining if not member(x)]
    return out


def _elsewhere(X: WeightedDesign, idx: int, y) -> bool:
    """Whether the base point y of shell idx appears in another shell."""
    sh = X.shells[idx]
    for jdx, other in enumerate(X.shells):
        if jdx == idx or not _same(other.radius2, sh.radius2):
            continue
        ratio = sh.scale2 / other.scale2
        lam = exact_sqrt(ratio)
        if lam is None:
            lam = MP.sqrt(to_mpf(ratio))
        if _point_lookup(other.points)(tuple(lam * v for v in y)):
            return True
    return False


def strength_invariant(X: WeightedDesign, G: ReflectionGroup, t_max: int) -> StrengthReport:
    """Certify strength through the G-invariant harmonic polynomials only."""
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    orbs = shell_orbits(X, G)
    q = molien_dims(G, t_max)
    residuals = []
    for l in range(1, t_max + 1):
        if q[l] == 0:
            continue
        B = invariant_harm_basis(G, l)
        vals = [(sh, N, B.values(rep)) for sh, rep, N in orbs]
        for j in range((t_max - l) // 2 + 1):
            for i in range(len(B)):
                acc = _Acc()
                for sh, N, v in vals:
                    c, rad = _lam_pow(sh.scale2, 2 * j + l)
                    acc.add(sh.weight * c * sh.base_norm2 ** j * N * v[i], rad)
                value, zero = acc.result()
                residuals.append(Residual(l, j, i, value, zero))
    return _report("invariant", t_max, residuals)


# strength: all harmonic polynomials -------------------------------------------

@lru_cache(maxsize=None)
def _monomial_plan(n: int, d: int):
    """For each exponent of degree d: (variable i, index of e - e_i in degree d-1)."""
    prev = {e: i for i, e in enumerate(hom_exponents(n, d - 1))}
    plan = []
    for e in hom_exponents(n, d):
        i = next(k for k, a in enumerate(e) if a)
        f = list(e)
        f[i] -= 1
        plan.append((i, prev[tuple(f)]))
    return plan


def monomial_moments(points, n: int, d_max: int) -> list[dict]:
    """[{a: sum_x x^a for |a| = d} for d = 0..d_max]."""
    sums = [[Fraction(0)] * len(hom_exponents(n, d)) for d in range(d_max + 1)]
    for x in points:
        vals = [Fraction(1)]
        sums[0][0] += 1
        for d in range(1, d_max + 1):
            vals = [vals[p] * x[i] for i, p in _monomial_plan(n, d)]
            s = sums[d]
            for k, v in enumerate(vals):
                if v != 0:
                    s[k] = s[k] + v
    return [dict(zip(hom_exponents(n, d), sums[d])) for d in range(d_max + 1)]


def strength_full(X: WeightedDesign, t_max: int) -> StrengthReport:
    """Certify strength with a basis of all harmonic polynomials."""
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    moms = [monomial_moments(sh.points, X.n, t_max) for sh in X.shells]
    residuals = []
    for l in range(1, t_max + 1):
        H = harm_basis(X.n, l)
        hnorm = [sum(abs(to_mpf(c)) for _, c in h.items()) for h in H]
        hs = []
        for mom in moms:
            row = []
            for h in H:
                total = Fraction(0)
                for e, c in h.items():
                    m = mom[l][e]
                    if m != 0:
                        total = total + c * m
                row.append(total)
            hs.append(row)
        for j in range((t_max - l) // 2 + 1):
            for i in range(len(H)):
                acc = _Acc()
                for sh, row in zip(X.shells, hs):
                    c, rad = _lam_pow(sh.scale2, 2 * j + l)
                    acc.add(sh.weight * c * sh.base_norm2 ** j * row[i], rad)
                    if not is_exact(row[i]):
                        # |h(x)| <= |h|_1 |x|^l on every point of the shell
                        acc.bound(to_mpf(sh.weight) * sh.size * hnorm[i]
                                  * to_mpf(sh.radius2) ** (MP.mpf(2 * j + l) / 2))
                value, zero = acc.result()
                residuals.append(Residual(l, j, i, value, zero))
    return _report("full_harmonic", t_max, residuals)


# strength: direct comparison with sphere averages ------------------------------

def _double_factorial(m: int) -> int:
    return prod(range(m, 0, -2)) if m > 0 else 1


def sphere_moment(n: int, a) -> Fraction:
    """Average of x^a over the unit sphere in R^n."""
    if any(x % 2 for x in a):
        return Fraction(0)
    d = sum(a)
    num = prod(_double_factorial(x - 1) for x in a)
    den = prod(n + 2 * i for i in range(d // 2))
    return Fraction(num, den)


def sphere_moment_gamma(n: int, a):
    """The same average from the Gamma-function formula (big float)."""
    if any(x % 2 for x in a):
        return MP.mpf(0)
    d = sum(a)
    num = MP.gamma(MP.mpf(n) / 2)
    for x in a:
        num *= MP.gamma(MP.mpf(x + 1) / 2)
    return num / (MP.gamma(MP.mpf(1) / 2) ** n * MP.gamma(MP.mpf(d + n) / 2))


def strength_direct(X: WeightedDesign, t_max: int) -> StrengthReport:
    """Compare weighted sums with exact sphere averages on every monomial."""
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    moms = [monomial_moments(sh.points, X.n, t_max) for sh in X.shells]
    residuals = []
    for d in range(1, t_max + 1):
        for a in hom_exponents(X.n, d):
            acc = _Acc()
            M = sphere_moment(X.n, a)
            for sh, mom in zip(X.shells, moms):
                c, rad = _lam_pow(sh.scale2, d)
                acc.add(sh.weight * c * mom[d][a], rad)
                if not is_exact(mom[d][a]):
                    acc.bound(to_mpf(sh.weight) * sh.size * to_mpf(sh.radius2) ** (MP.mpf(d) / 2))
                if M:
                    acc.add(-sh.weight * sh.size * M * (sh.scale2 * sh.base_norm2) ** (d // 2))
            value, zero = acc.result()
            residuals.append(Residual(d, 0, a, value, zero))
    return _report("direct_integration", t_max, residuals)


def strength(X: WeightedDesign, t_max: int, method: str = "full_harmonic",
             G: ReflectionGroup | None = None) -> StrengthReport:
    if method == "invariant":
        if G is None:
            raise ValueError("the invariant method needs a group")
        return strength_invariant(X, G, t_max)
    if method == "full_harmonic":
        return strength_full(X, t_max)
    if method == "direct_integration":
        return strength_direct(X, t_max)
    raise ValueError(f"unknown method {method!r}")


# Fisher-type bounds ---------------------------------------------------------------

def dim_P(n: int, l: int, p: int, eps: int = 0) -> int:
    """dim of polynomials of degree <= l restricted to p concentric spheres."""
    pp = p - eps
    if l >= 2 * pp:
        return eps + sum(comb(n + l - i - 1, n - 1) for i in range(2 * pp))
    return comb(n + l, l)


def dim_P_star(n: int, l: int, p: int, eps: int = 0) -> int:
    """dim of polynomials with only degrees l, l-2, ... restricted to p spheres."""
    pp = p - eps
    if l >= 2 * pp:
        s = sum(comb(n + l - 2 * i - 1, n - 1) for i in range(pp))
        return s + eps if l % 2 == 0 else s
    return sum(comb(n + l - 2 * i - 1, n - 1) for i in range(l // 2 + 1))


def fisher_bound(n: int, t: int, p: int, eps: int = 0, origin_in_X: bool = False) -> int:
    """Lower bound on the size of a t-design supported by p concentric spheres."""
    if t < 1 or p < 1:
        raise ValueError("need t >= 1 and p >= 1")
    if t % 2 == 0:
        return dim_P(n, t // 2, p, eps)
    e = (t + 1) // 2
    b = 2 * dim_P_star(n, e - 1, p, eps)
    return b - 1 if (e % 2 == 1 and origin_in_X) else b


@dataclass
class TightReport:
    tight: bool
    size: int
    bound: int
    slack: int
    p: int
    eps: int


def is_tight(X: WeightedDesign, t: int, G: ReflectionGroup | None = None) -> TightReport:
    """Compare |X| with the bound for t-designs on X's supporting spheres.

    ``G`` is accepted for symmetry with the strength methods; the bound only
    depends on X.
    """
    eps = int(X.contains_origin)
    b = fisher_bound(X.n, t, X.p, eps, X.contains_origin)
    return TightReport(X.size == b, X.size, b, X.size - b, X.p, eps)


# nonexistence --------------------------------------------------------------------

class ObstructionViolation(AssertionError):
    pass


def nonexistence_obstruction(dynkin_type: str, n: int) -> list[dict]:
    """Per corner index, the signed quantity that rules out high-strength X(G, J).

    A: sum of the degree-6 obstruction over the unit orbit of v_k, with its
    factorization g1 * F(k); every value is negative, so no 6-design exists.
    B, D: f8(v_k) > 0 for every k, so no 8-design exists.
    """
    t = dynkin_type.upper()
    G = build_group(t, n)
    rows = []
    if t == "A":
        for k in range(1, n + 1):
            total = orbit_sum_obstruction(n, k)
            g1, F = obstruction_parts(n, k)
            if total != g1 * F:
                raise ObstructionViolation(f"A{n}, k={k}: orbit sum differs from g1*F")
            if sign(F) >= 0 or sign(g1) <= 0 or sign(total) >= 0:
                raise ObstructionViolation(f"A{n}, k={k}: expected F(k) < 0")
            rows.append({"k": k, "N": corner_orbit_size(t, n, k), "value": total,
                         "g1": g1, "F": F, "sign": -1})
        return rows
    if t in ("B", "D"):
        f8 = closed_form_invariant(t, n, "f8")
        for k in range(1, n + 1):
            v = evaluate_at_corner(f8, t, n, k)
            if sign(v) <= 0:
                raise ObstructionViolation(f"{t}{n}, k={k}: expected f8(v_k) > 0")
            rows.append({"k": k, "N": corner_orbit_size(t, n, k), "value": v, "sign": 1})
        return rows
    raise ValueError(f"unsupported type {dynkin_type!r}")


def max_strength(dynkin_type: str) -> int:
    """Largest t reachable by any X(G, J): 5 for A, 7 for B and D."""
    return {"A": 5, "B": 7, "D": 7}[dynkin_type.upper()]


__all__ = [
    "Shell", "WeightedDesign", "corner_design", "Residual", "StrengthReport",
    "strength_invariant", "strength_full", "strength_direct", "strength", "sphere_moment",
    "sphere_moment_gamma", "monomial_moments", "dim_P", "dim_P_star", "fisher_bound",
    "is_tight", "TightReport", "nonexistence_obstruction", "ObstructionViolation",
    "shell_orbits", "METHODS", "corner_vectors", "max_strength",
]
