"""Two-dimensional cubature for radially symmetric integrals on rotated polygons.

A formula consists of circles of radius r_i, each carrying K equally spaced
points rotated by sigma_i * pi / K, all with weight proportional to lambda_i,
plus an optional point at the origin.  It integrates

    I[f] = int_0^inf ( int_0^2pi f(r cos t, r sin t) dt ) r W(r) dr

and everything about W enters through mu(j) = int_0^inf r^(2j+1) W(r) dr.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import numpy as np
from scipy.optimize import least_squares

from .linalg import rref
from .poly import MultiPoly, act
from .scalar import MP, Quad, is_exact, to_mpf, tolerance

FAMILIES = ("odd", "even")


class XuSolveError(RuntimeError):
    """No positive solution of the moment system was found."""


class XuConsistencyError(AssertionError):
    """The brute-force and the reduced degree checks disagree."""


# ---------------------------------------------------------------------------------
# weights

@dataclass(frozen=True)
class RadialWeight:
    name: str
    moments: tuple = ()

    def mu(self, j: int):
        if j < 0:
            raise ValueError("moment index must be >= 0")
        if self.name == "gaussian":
            return Fraction(factorial(j), 2)
        if self.name == "unit_disk":
            return Fraction(1, 2 * j + 2)
        if j >= len(self.moments):
            raise ValueError(f"weight {self.name!r} has no moment of index {j}")
        return self.moments[j]

    @classmethod
    def gaussian(cls) -> RadialWeight:
        """W(r) = exp(-r^2)."""
        return cls("gaussian")

    @classmethod
    def unit_disk(cls) -> RadialWeight:
        """W = 1 on [0, 1]."""
        return cls("unit_disk")

    @classmethod
    def custom(cls, moments, name: str = "custom") -> RadialWeight:
        ms = tuple(Fraction(m) if isinstance(m, (int, str)) else m for m in moments)
        if any(to_mpf(m) <= 0 for m in ms):
            raise ValueError("moments must be positive")
        return cls(name, ms)


def weight_by_name(name: str) -> RadialWeight:
    if name == "gaussian":
        return RadialWeight.gaussian()
    if name in ("unit_disk", "unit-disk", "disk"):
        return RadialWeight.unit_disk()
    raise ValueError(f"unknown weight {name!r}; expected gaussian or unit_disk")


# ---------------------------------------------------------------------------------
# formulas

def _layout(family: str, n: int):
    """(m, circles, angles per circle, has centre, degree) for a family and n."""
    if family not in FAMILIES:
        raise ValueError(f"family must be 'odd' or 'even', got {family!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if family == "odd":
        m = n // 2
        if n % 2 == 0:
            return m, m, 2 * m + 2, False, 2 * n - 1
        return m, m, 2 * m + 4, True, 2 * n - 1
    m = (n + 1) // 2
    return m, (n + 2) // 2, 2 * m + 1, False, 2 * n


@dataclass(frozen=True)
class XuFormula:
    """Nodes r_i with coefficients lambda_i (and lambda_0 at the origin)."""

    family: str
    n: int
    lam: tuple
    r: tuple
    lam0: object = None

    def __post_init__(self):
        m, c, K, centre, _ = _layout(self.family, self.n)
        if len(self.lam) != c or len(self.r) != c:
            raise ValueError(f"{self.family} family with n={self.n} needs {c} circles")
        if centre and self.lam0 is None:
            raise ValueError("this formula has a point at the origin; lambda0 is required")
        if not centre and self.lam0 is not None:
            raise ValueError("this formula has no point at the origin")

    @property
    def m(self) -> int:
        return _layout(self.family, self.n)[0]

    @property
    def circles(self) -> int:
        return len(self.r)

    @property
    def angles(self) -> int:
        return _layout(self.family, self.n)[2]

    @property
    def degree(self) -> int:
        return _layout(self.family, self.n)[4]

    @property
    def sigma(self) -> tuple:
        return tuple((self.m + i) % 2 for i in range(1, self.circles + 1))

    def point_weight(self, i: int):
        """Weight of each point on circle i (1-based): total 2 pi lambda_i per circle."""
        return 2 * MP.pi * to_mpf(self.lam[i - 1]) / self.angles

    def to_json(self, digits: int = 70) -> dict:
        def fmt(x):
            return str(x) if is_exact(x) and not isinstance(x, Quad) else MP.nstr(to_mpf(x), digits)

        out = {"family": self.family, "n": self.n, "m": self.m,
               "lambda": [fmt(x) for x in self.lam], "r": [fmt(x) for x in self.r]}
        if self.lam0 is not None:
            out["lambda0"] = fmt(self.lam0)
        return out

    @classmethod
    def from_json(cls, data: dict) -> XuFormula:
        def parse(x):
            s = str(x)
            if "." in s or "e" in s.lower():
                return MP.mpf(s)
            return Fraction(s)

        lam0 = data.get("lambda0")
        return cls(data["family"], int(data["n"]), tuple(parse(x) for x in data["lambda"]),
                   tuple(parse(x) for x in data["r"]),
                   None if lam0 is None else parse(lam0))


def build_points(F: XuFormula) -> list[tuple[tuple, object]]:
    """[((x, y), weight)] with big-float coordinates."""
    K = F.angles
    out = []
    if F.lam0 is not None:
        out.append(((MP.mpf(0), MP.mpf(0)), to_mpf(F.lam0)))
    for i, (r, s) in enumerate(zip(F.r, F.sigma), start=1):
        w = F.point_weight(i)
        r = to_mpf(r)
        for j in range(K):
            th = (2 * j + s) * MP.pi / K
            out.append(((r * MP.cos(th), r * MP.sin(th)), w))
    return out


# ---------------------------------------------------------------------------------
# conditions

@dataclass(frozen=True)
class Condition:
    kind: str          # "moment" or "alternating"
    j: int
    value: object
    scale: object
    ok: bool


@dataclass
class ConditionReport:
    passed: bool
    conditions: list = field(default_factory=list)

    def failing(self) -> list:
        return [c for c in self.conditions if not c.ok]


def condition_ranges(family: str, n: int):
    """(moment j's, alternating j's, alternating radius exponent as a function of j)."""
    if family == "odd":
        return range(0, n), range((n + 3) // 2, n), (lambda j: 2 * j)
    return range(0, n + 1), range((n + 1) // 2, n), (lambda j: 2 * j + 1)


def _rpow(r, e: int):
    return r ** e


def _ok(value, scale, tol) -> bool:
    if is_exact(value):
        return value == 0
    return abs(to_mpf(value)) <= tol * max(to_mpf(scale), 1)


def verify_conditions(F: XuFormula, W: RadialWeight, tol=None) -> ConditionReport:
    """Moment equations (from j = 0) and alternating equations, as residuals."""
    tol = tolerance() if tol is None else tol
    moments, alternating, expo = condition_ranges(F.family, F.n)
    conds = []
    for j in moments:
        terms = [lam * _rpow(r, 2 * j) for lam, r in zip(F.lam, F.r)]
        if j == 0 and F.lam0 is not None:
            terms.append(to_mpf(F.lam0) / (2 * MP.pi))
        mu = W.mu(j)
        value = sum(terms, Fraction(0)) - mu
        scale = sum(abs(to_mpf(x)) for x in terms) + abs(to_mpf(mu))
        conds.append(Condition("moment", j, value, scale, _ok(value, scale, tol)))
    for j in alternating:
        e = expo(j)
        terms = [(-1) ** i * lam * _rpow(r, e) for i, (lam, r) in enumerate(zip(F.lam, F.r), 1)]
        value = sum(terms, Fraction(0))
        scale = sum(abs(to_mpf(x)) for x in terms)
        conds.append(Condition("alternating", j, value, scale, _ok(value, scale, tol)))
    return ConditionReport(all(c.ok for c in conds), conds)


# ---------------------------------------------------------------------------------
# degree checks

def _double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def angular_integral(a: int, b: int):
    """int_0^2pi cos^a t sin^b t dt."""
    if a % 2 or b % 2:
        return MP.mpf(0)
    return 2 * MP.pi * Fraction(_double_factorial(a - 1) * _double_factorial(b - 1),
                                _double_factorial(a + b))


def monomial_integral(W: RadialWeight, a: int, b: int):
    """I[x^a y^b]."""
    if a % 2 or b % 2:
        return MP.mpf(0)
    return to_mpf(W.mu((a + b) // 2)) * angular_integral(a, b)


def invariant_integral(W: RadialWeight, K: int, p: int, q: int):
    """I[u^p v^q] with u = x^2 + y^2 and v = Re((x + iy)^K)."""
    if q % 2:
        return MP.mpf(0)
    deg = 2 * p + K * q
    return (to_mpf(W.mu(deg // 2)) * 2 * MP.pi
            * Fraction(_double_factorial(q - 1), _double_factorial(q)))


@dataclass
class DegreeReport:
    passed: bool
    t: int
    brute: list
    reduced: list
    brute_count: int
    reduced_count: int

    def failing(self) -> list:
        return [r for r in self.brute if not r[3]]


def _check(total, mag, exact, tol):
    res = total - exact
    return res, abs(res) <= tol * max(mag, abs(exact), 1)


def verify_degree(F: XuFormula, W: RadialWeight, t: int, tol=None) -> DegreeReport:
    """Exactness on all polynomials of degree <= t, checked two ways.

    (a) every monomial x^a y^b; (b) only u^p v^q with u = r^2 and
    v = r^K cos(K theta), which suffices because the formula and the
    integral are invariant under the dihedral group of order 2K.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    tol = tolerance() if tol is None else tol
    pts = build_points(F)
    brute = []
    for d in range(t + 1):
        for a in range(d, -1, -1):
            b = d - a
            total, mag = MP.mpf(0), MP.mpf(0)
            for (x, y), w in pts:
                v = w * x ** a * y ** b
                total += v
                mag += abs(v)
            res, ok = _check(total, mag, monomial_integral(W, a, b), tol)
            brute.append((a, b, res, ok))
    K = F.angles
    reduced = []
    uv = []
    for (x, y), w in pts:
        z = MP.mpc(x, y) ** K
        uv.append((x * x + y * y, z.real, w))
    for p in range(t // 2 + 1):
        for q in range((t - 2 * p) // K + 1):
            total, mag = MP.mpf(0), MP.mpf(0)
            for u, v, w in uv:
                val = w * u ** p * v ** q
                total += val
                mag += abs(val)
            res, ok = _check(total, mag, invariant_integral(W, K, p, q), tol)
            reduced.append((p, q, res, ok))
    pa = all(r[3] for r in brute)
    pb = all(r[3] for r in reduced)
    if pa != pb:
        raise XuConsistencyError(
            f"monomial check {'passes' if pa else 'fails'} but the invariant check "
            f"{'passes' if pb else 'fails'} at t={t}")
    return DegreeReport(pa, t, brute, reduced, len(brute), len(reduced))


# ---------------------------------------------------------------------------------
# solving the moment system

def gauss_nodes(moments, count: int, fixed_zero: bool = False):
    """Nodes and weights of the Gauss (or Gauss-Radau, with a node at 0) rule in s.

    ``moments`` are mu(0), mu(1), ... of the measure in s = r^2; the rule is
    exact for s^j with j < 2 count (j < 2 count + 1 for Radau).  Golub-Welsch
    from the Cholesky factor of the Hankel moment matrix.
    """
    mu = [to_mpf(x) for x in moments]
    N = count + 1 if fixed_zero else count
    H = MP.matrix(N + 1, N + 1)
    for i in range(N + 1):
        for j in range(N + 1):
            H[i, j] = mu[i + j]
    L = MP.cholesky(H)
    R = L.T
    alpha, beta = [], []
    for k in range(N):
        a = R[k, k + 1] / R[k, k] - (R[k - 1, k] / R[k - 1, k - 1] if k else 0)
        alpha.append(a)
        if k + 1 < N:
            beta.append(R[k + 1, k + 1] / R[k, k])
    if fixed_zero:
        # modify the last diagonal entry so that 0 is an eigenvalue
        p_prev, p_cur = MP.mpf(1), -alpha[0]
        polys = [p_prev, p_cur]
        for k in range(1, N - 1):
            nxt = -alpha[k] * polys[-1] - beta[k - 1] ** 2 * polys[-2]
            polys.append(nxt)
        alpha[-1] = -beta[-1] ** 2 * polys[-2] / polys[-1]
    J = MP.matrix(N, N)
    for k in range(N):
        J[k, k] = alpha[k]
        if k + 1 < N:
            J[k, k + 1] = J[k + 1, k] = beta[k]
    E, Q = MP.eighe(J)
    nodes = [E[k] for k in range(N)]
    weights = [mu[0] * Q[0, k] ** 2 for k in range(N)]
    order = sorted(range(N), key=lambda k: nodes[k])
    return [nodes[k] for k in order], [weights[k] for k in order]


def _unknowns(family, n):
    m, c, K, centre, _ = _layout(family, n)
    return c, centre


def _residuals(params, family, n, mus, ctx):
    """Relative residuals of the moment and alternating equations.

    params = log lambda_1..c, log s_1..c [, log lambda_0].
    """
    c, centre = _unknowns(family, n)
    lam = [ctx.exp(params[i]) for i in range(c)]
    s = [ctx.exp(params[c + i]) for i in range(c)]
    lam0 = ctx.exp(params[2 * c]) if centre else 0
    moments, alternating, expo = condition_ranges(family, n)
    out = []
    for j in moments:
        v = sum(lam[i] * s[i] ** j for i in range(c))
        if j == 0 and centre:
            v += lam0 / (2 * ctx.pi)
        out.append(v / mus[j] - 1)
    for j in alternating:
        e = expo(j)
        v = sum((-1) ** (i + 1) * lam[i] * s[i] ** (ctx.mpf(e) / 2) for i in range(c))
        out.append(v / mus[j])
    return out


class _Float:
    pi = np.pi
    exp = staticmethod(np.exp)

    @staticmethod
    def mpf(x):
        return float(x)


def _jacobian(params, family, n, mus):
    h = MP.mpf(2) ** (-MP.prec // 3)
    base = _residuals(params, family, n, mus, MP)
    cols = []
    for k in range(len(params)):
        p = list(params)
        p[k] += h
        r = _residuals(p, family, n, mus, MP)
        p[k] -= 2 * h
        r2 = _residuals(p, family, n, mus, MP)
        cols.append([(a - b) / (2 * h) for a, b in zip(r, r2)])
    return base, MP.matrix([[cols[k][i] for k in range(len(params))] for i in range(len(base))])


def _polish(params, family, n, mus, iterations: int = 80):
    params = [MP.mpf(p) for p in params]
    for _ in range(iterations):
        base, Jm = _jacobian(params, family, n, mus)
        if max(abs(v) for v in base) < MP.mpf(2) ** (-MP.prec + 8):
            break
        rhs = MP.matrix([-v for v in base])
        try:
            step, _ = MP.qr_solve(Jm, rhs)
        except (ZeroDivisionError, ValueError):
            break
        params = [p + step[k] for k, p in enumerate(params)]
        if MP.norm(step) < MP.mpf(2) ** (-MP.prec + 16):
            break
    return params, _residuals(params, family, n, mus, MP)


def _seeds(family, n, mus, rng, extra: int = 24):
    c, centre = _unknowns(family, n)
    seeds = []
    try:
        nodes, weights = gauss_nodes(mus, c, fixed_zero=centre)
        if centre:
            lam0 = weights[0] * 2 * MP.pi
            nodes, weights = nodes[1:], weights[1:]
        base = [float(MP.log(w)) for w in weights] + [float(MP.log(x)) for x in nodes]
        if centre:
            base.append(float(MP.log(lam0)))
        if all(np.isfinite(base)):
            seeds.append(base)
    except (ZeroDivisionError, ValueError):
        pass
    mean = float(MP.log(to_mpf(mus[1]) / to_mpf(mus[0]))) if len(mus) > 1 else 0.0
    for _ in range(extra):
        p = [float(MP.log(to_mpf(mus[0]) / c)) + rng.gauss(0, 1) for _ in range(c)]
        p += sorted(mean + rng.gauss(0, 1.5) for _ in range(c))
        if centre:
            p.append(float(MP.log(to_mpf(mus[0]))) + rng.gauss(0, 1))
        seeds.append(p)
    return seeds


def solve_moment_system(W: RadialWeight, n: int, family: str = "odd", seed: int = 0,
                        tol=None) -> XuFormula:
    """A formula with positive lambda_i and distinct positive r_i meeting all conditions.

    Least squares in log-coordinates (lambda_i, s_i = r_i^2) seeded from the
    Gauss rule of the measure in s, then Gauss-Newton refinement in big
    floats.  Raises XuSolveError when no seed reaches a zero residual.
    """
    c, centre = _unknowns(family, n)
    if c == 0:
        if family == "odd" and centre:
            F = XuFormula(family, n, (), (), 2 * MP.pi * to_mpf(W.mu(0)))
            if verify_conditions(F, W, tol).passed:
                return F
        raise XuSolveError("no circles to solve for")
    moments, alternating, _ = condition_ranges(family, n)
    top = max(list(moments) + list(alternating))
    mus = [W.mu(j) for j in range(max(top, 2 * c + 2) + 1)]
    mus_f = [float(x) for x in mus]
    rng = random.Random(seed)
    best = None
    for s0 in _seeds(family, n, mus, rng):
        try:
            with np.errstate(all="ignore"):
                res = least_squares(lambda p: np.array(_residuals(p, family, n, mus_f, _Float)),
                                    np.array(s0), method="lm",
                                    xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
        except (ValueError, FloatingPointError, OverflowError):
            continue
        if not np.all(np.isfinite(res.x)):
            continue
        cost = float(np.max(np.abs(res.fun)))
        if best is None or cost < best[0]:
            best = (cost, res.x)
        if cost < 1e-10:
            break
    if best is None or best[0] > 1e-8:
        floor = "n/a" if best is None else f"{best[0]:.3g}"
        raise XuSolveError(
            f"no positive solution for the {family} family, n={n}, weight {W.name} "
            f"(smallest residual {floor}; {len(list(moments)) + len(list(alternating))} "
            f"equations in {2 * c + centre} unknowns)")
    params, resid = _polish(list(best[1]), family, n, mus)
    lam = tuple(MP.exp(params[i]) for i in range(c))
    r = tuple(MP.sqrt(MP.exp(params[c + i])) for i in range(c))
    lam0 = MP.exp(params[2 * c]) if centre else None
    order = sorted(range(c), key=lambda i: r[i])
    if any(abs(r[order[i]] - r[order[i + 1]]) <= tolerance() for i in range(c - 1)):
        raise XuSolveError("solution has coinciding radii")
    F = XuFormula(family, n, lam, r, lam0)
    rep = verify_conditions(F, W, tol)
    if not rep.passed:
        worst = max(abs(to_mpf(x.value)) for x in rep.conditions)
        raise XuSolveError(f"refinement did not converge (largest residual {MP.nstr(worst, 5)})")
    return F


# ---------------------------------------------------------------------------------
# dihedral invariants

def dihedral_generators(ell: int):
    """Reflection in the x-axis and rotation by 2 pi / ell, exact when possible."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    refl = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(-1)))
    exact = {
        1: (Fraction(1), Fraction(0)), 2: (Fraction(-1), Fraction(0)),
        3: (Fraction(-1, 2), Quad(0, Fraction(1, 2), 3)), 4: (Fraction(0), Fraction(1)),
        6: (Fraction(1, 2), Quad(0, Fraction(1, 2), 3)),
        8: (Quad(0, Fraction(1, 2), 2), Quad(0, Fraction(1, 2), 2)),
        12: (Quad(0, Fraction(1, 2), 3), Fraction(1, 2)),
    }
    if ell in exact:
        c, s = exact[ell]
    else:
        c, s = MP.cos(2 * MP.pi / ell), MP.sin(2 * MP.pi / ell)
    rot = ((c, -s), (s, c))
    return refl, rot


def u_poly() -> MultiPoly:
    return MultiPoly(2, {(2, 0): 1, (0, 2): 1})


def v_poly(ell: int) -> MultiPoly:
    """Re((x + i y)^ell)."""
    return MultiPoly(2, {(ell - 2 * k, 2 * k): (-1) ** k * comb(ell, 2 * k)
                         for k in range(ell // 2 + 1)})


def is_dihedral_invariant(f: MultiPoly, ell: int) -> bool:
    if f.n != 2:
        raise ValueError("dihedral invariants live in two variables")
    for g in dihedral_generators(ell):
        d = act(g, f) - f
        if f.is_exact() and all(is_exact(x) for row in g for x in row):
            if not d.is_zero():
                return False
        elif not d.is_numerically_zero(max(to_mpf(f.max_abs_coeff()), 1)):
            return False
    return True


def reconstruct(coeffs: dict, ell: int) -> MultiPoly:
    u, v = u_poly(), v_poly(ell)
    out = MultiPoly(2)
    for (p, q), c in coeffs.items():
        out = out + (u ** p) * (v ** q) * c
    return out


def dihedral_reduce(f: MultiPoly, ell: int) -> dict:
    """{(p, q): c} with f = sum c u^p v^q, u = x^2 + y^2, v = Re((x + i y)^ell)."""
    if not is_dihedral_invariant(f, ell):
        raise ValueError(f"polynomial is not invariant under the dihedral group of order {2 * ell}")
    u, v = u_poly(), v_poly(ell)
    exact = f.is_exact()
    out = {}
    for d in sorted({sum(e) for e, _ in f.items()}):
        fd = MultiPoly(2, {e: c for e, c in f.items() if sum(e) == d})
        pairs = [(p, q) for q in range(d // ell + 1) for p in [(d - ell * q) // 2]
                 if 2 * p + ell * q == d]
        if not pairs:
            raise ValueError(f"degree {d} part is not a polynomial in u and v")
        basis = [(u ** p) * (v ** q) for p, q in pairs]
        monos = [(a, d - a) for a in range(d, -1, -1)]
        rows = [[b.coeff(mn) for b in basis] + [fd.coeff(mn)] for mn in monos]
        if exact:
            red, piv = rref(rows, len(pairs) + 1)
            if len(pairs) in piv:
                raise ValueError(f"degree {d} part is not a polynomial in u and v")
            sol = [Fraction(0)] * len(pairs)
            for row, pc in zip(red, piv):
                sol[pc] = row[-1]
        else:
            A = MP.matrix([[to_mpf(x) for x in r[:-1]] for r in rows])
            bvec = MP.matrix([to_mpf(r[-1]) for r in rows])
            sol_m, _ = MP.qr_solve(A, bvec)
            sol = [sol_m[i] for i in range(len(pairs))]
        for pq, c in zip(pairs, sol):
            if c != 0:
                out[pq] = c
    back = reconstruct(out, ell) - f
    if exact and not back.is_zero():
        raise ValueError("reconstruction does not match")
    if not exact and not back.is_numerically_zero(max(to_mpf(f.max_abs_coeff()), 1)):
        raise ValueError("reconstruction does not match")
    return out


__all__ = [
    "RadialWeight", "XuFormula", "build_points", "verify_conditions", "verify_degree",
    "solve_moment_system", "dihedral_reduce", "reconstruct", "gauss_nodes", "XuSolveError",
    "XuConsistencyError", "ConditionReport", "Condition", "DegreeReport", "weight_by_name",
    "condition_ranges", "monomial_integral", "invariant_integral", "angular_integral",
    "u_poly", "v_poly", "is_dihedral_invariant", "dihedral_generators", "FAMILIES",
]
