"""Sparse multivariate polynomials over exact or big-float scalars."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial

from sympy.utilities.iterables import multiset_permutations

from .scalar import MP, Quad, format_scalar, is_exact, is_zero, to_mpf


def _nonzero(c) -> bool:
    return c != 0


class MultiPoly:
    """Polynomial in ``n`` variables stored as {exponent tuple: coefficient}.

    Values are immutable; zero coefficients are never stored.
    """

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms=None):
        self.n = n
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n or min(e, default=0) < 0:
                raise ValueError(f"bad exponent {e} for {n} variables")
            if isinstance(c, int):
                c = Fraction(c)
            if _nonzero(c):
                clean[e] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, n, terms):
        p = object.__new__(cls)
        p.n, p._terms, p._hash = n, terms, None
        return p

    @classmethod
    def monomial(cls, n: int, exps, coeff=1) -> MultiPoly:
        return cls(n, {tuple(exps): coeff})

    @classmethod
    def variable(cls, n: int, i: int) -> MultiPoly:
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def constant(cls, n: int, c) -> MultiPoly:
        return cls(n, {(0,) * n: c})

    def items(self):
        return self._terms.items()

    def coeff(self, exps):
        return self._terms.get(tuple(exps), Fraction(0))

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    # arithmetic -----------------------------------------------------------
    def _check(self, other):
        if other.n != self.n:
            raise ValueError(f"variable count mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.n, other)
        self._check(other)
        t = dict(self._terms)
        for e, c in other._terms.items():
            v = t.get(e, 0) + c
            if _nonzero(v):
                t[e] = v
            else:
                t.pop(e, None)
        return MultiPoly._wrap(self.n, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._wrap(self.n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if not _nonzero(other):
                return MultiPoly._wrap(self.n, {})
            return MultiPoly._wrap(self.n, {e: c * other for e, c in self._terms.items()
                                            if _nonzero(c * other)})
        self._check(other)
        t = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return MultiPoly._wrap(self.n, {e: c for e, c in t.items() if _nonzero(c)})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / Fraction(scalar) if isinstance(scalar, int) else 1 / scalar)

    def __pow__(self, k: int):
        out = MultiPoly.constant(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.n == other.n and self._terms == other._terms
        if not _nonzero(other):
            return not self._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def __call__(self, *x):
        return evaluate(self, x[0] if len(x) == 1 and isinstance(x[0], (list, tuple)) else x)

    def map_coeffs(self, fn) -> MultiPoly:
        return MultiPoly(self.n, {e: fn(c) for e, c in self._terms.items()})

    def diff(self, i: int) -> MultiPoly:
        t = {}
        for e, c in self._terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                t[tuple(f)] = c * e[i]
        return MultiPoly._wrap(self.n, t)

    def directional(self, u) -> MultiPoly:
        """Derivative along the vector ``u``: sum_i u_i df/dx_i."""
        out = MultiPoly._wrap(self.n, {})
        for i, ui in enumerate(u):
            if _nonzero(ui):
                out = out + self.diff(i) * ui
        return out

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self._terms.values())

    def max_abs_coeff(self):
        return max((abs(to_mpf(c)) for c in self._terms.values()), default=MP.mpf(0))

    def is_numerically_zero(self, scale=None) -> bool:
        return all(is_zero(c, scale) for c in self._terms.values())

    def sorted_terms(self):
        """Terms in graded lexicographic order, leading term first."""
        return sorted(self._terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"MultiPoly({self.n}, {format_poly(self)!r})"


def format_poly(f: MultiPoly) -> str:
    """Text form ``c * x1^a1 x2^a2`` with terms joined by ``+``/``-``."""
    if f.is_zero():
        return "0"
    parts = []
    for e, c in f.sorted_terms():
        mono = " ".join(f"x{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a)
        neg = False
        if isinstance(c, Quad):
            cs = f"({format_scalar(c)})"
        else:
            if (is_exact(c) and c < 0) or (not is_exact(c) and c < 0):
                neg, c = True, -c
            cs = format_scalar(c)
            if mono and c == 1:
                cs = ""
        body = mono if not cs else (f"{cs} * {mono}" if mono else cs)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


@lru_cache(maxsize=None)
def hom_exponents(n: int, l: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors of total degree l, graded-lex descending."""
    if n == 0:
        return ((),) if l == 0 else ()
    out = []
    for first in range(l, -1, -1):
        for rest in hom_exponents(n - 1, l - first):
            out.append((first,) + rest)
    return tuple(out)


def evaluate(f: MultiPoly, x):
    """f(x); exact when f and x are exact, big float otherwise."""
    if len(x) != f.n:
        raise ValueError(f"point has {len(x)} coordinates, polynomial has {f.n} variables")
    if f.is_zero():
        return Fraction(0)
    if not all(is_exact(v) for v in x) or not f.is_exact():
        x = [to_mpf(v) for v in x]
    maxe = [0] * f.n
    for e in f._terms:
        for i, a in enumerate(e):
            if a > maxe[i]:
                maxe[i] = a
    powers = []
    for v, m in zip(x, maxe):
        p = [Fraction(1)]
        for _ in range(m):
            p.append(p[-1] * v)
        powers.append(p)
    total = Fraction(0)
    for e, c in f._terms.items():
        term = c
        for i, a in enumerate(e):
            if a:
                term = term * powers[i][a]
        total = total + term
    return total


def laplacian(f: MultiPoly) -> MultiPoly:
    t = {}
    for e, c in f.items():
        for i, a in enumerate(e):
            if a >= 2:
                g = list(e)
                g[i] -= 2
                g = tuple(g)
                t[g] = t.get(g, 0) + c * (a * (a - 1))
    return MultiPoly(f.n, t)


# group action -------------------------------------------------------------

def _check_orthogonal(g, n: int) -> None:
    if len(g) != n or any(len(row) != n for row in g):
        raise ValueError(f"matrix is not {n}x{n}")
    exact = all(is_exact(v) for row in g for v in row)
    for i in range(n):
        for j in range(i, n):
            s = sum((g[k][i] * g[k][j] for k in range(n)), Fraction(0))
            target = 1 if i == j else 0
            if exact:
                if s != target:
                    raise ValueError("matrix is not orthogonal")
            elif not is_zero(s - target):
                raise ValueError("matrix is not orthogonal")


def _monomial_image(g, n):
    """For a monomial matrix (one nonzero per column) return
    [(row index, entry)] per column, else None."""
    cols = []
    for j in range(n):
        nz = [(i, g[i][j]) for i in range(n) if _nonzero(g[i][j])]
        if len(nz) != 1:
            return None
        cols.append(nz[0])
    return cols


def _rank_one_defect(h, n):
    """If I - h == u w^T return (u, w), else None."""
    m = [[(1 if i == j else 0) - h[i][j] for j in range(n)] for i in range(n)]
    r = next((i for i in range(n) if any(_nonzero(v) for v in m[i])), None)
    if r is None:
        return None
    c = next(j for j in range(n) if _nonzero(m[r][j]))
    u = [m[i][c] for i in range(n)]
    w = [m[r][j] / m[r][c] for j in range(n)]
    for i in range(n):
        for j in range(n):
            d = m[i][j] - u[i] * w[j]
            if not (d == 0 if is_exact(d) else is_zero(d)):
                return None
    return u, w


def _substitute(f: MultiPoly, forms) -> MultiPoly:
    """f(y) with y_j = forms[j] (linear MultiPolys), via cached powers."""
    n = f.n
    cache = {}

    def power(j, a):
        key = (j, a)
        if key not in cache:
            cache[key] = MultiPoly.constant(n, 1) if a == 0 else power(j, a - 1) * forms[j]
        return cache[key]

    out = MultiPoly._wrap(n, {})
    for e, c in f.items():
        term = MultiPoly.constant(n, c)
        for j, a in enumerate(e):
            if a:
                term = term * power(j, a)
        out = out + term
    return out


def act(g, f: MultiPoly, check: bool = True) -> MultiPoly:
    """The polynomial x -> f(g^-1 x) (points are column vectors).

    This is a left action: act(g1 g2, f) == act(g1, act(g2, f)).  For an
    orthogonal g, g^-1 = g^T.
    """
    n = f.n
    if check:
        _check_orthogonal(g, n)
    elif len(g) != n:
        raise ValueError(f"matrix is not {n}x{n}")
    # y = g^T x, so y_j = sum_i g[i][j] x_i
    h = [[g[j][i] for j in range(n)] for i in range(n)]  # h = g^T
    mono = _monomial_image(g, n)
    if mono is not None:
        t = {}
        for e, c in f.items():
            new = [0] * n
            coef = c
            for j, a in enumerate(e):
                if a:
                    i, v = mono[j]
                    new[i] += a
                    coef = coef * v ** a
            t[tuple(new)] = t.get(tuple(new), 0) + coef
        return MultiPoly(n, t)
    defect = _rank_one_defect(h, n)
    if defect is not None:
        # f(x - u (w.x)) = sum_k (-(w.x))^k / k! (D_u^k f)(x)
        u, w = defect
        tform = MultiPoly(n, {tuple(int(i == j) for i in range(n)): w[j] for j in range(n)})
        out = MultiPoly._wrap(n, {})
        deriv, tpow = f, MultiPoly.constant(n, 1)
        for k in range(f.degree() + 1):
            if deriv.is_zero():
                break
            out = out + deriv * tpow * Fraction((-1) ** k, factorial(k))
            deriv = deriv.directional(u)
            tpow = tpow * tform
        return out
    forms = [MultiPoly(n, {tuple(int(i == k) for k in range(n)): h[j][i] for i in range(n)})
             for j in range(n)]
    return _substitute(f, forms)


def permute(f: MultiPoly, perm) -> MultiPoly:
    """f(x_perm(0), ..., x_perm(n-1)) for a permutation of variable indices."""
    t = {}
    for e, c in f.items():
        new = [0] * f.n
        for j, a in enumerate(e):
            new[perm[j]] = a
        t[tuple(new)] = c
    return MultiPoly._wrap(f.n, t)


def sym(f: MultiPoly) -> MultiPoly:
    """Sum of the distinct images of f under permutations of the variables."""
    if f.is_zero():
        raise ValueError("sym of the zero polynomial")
    n = f.n
    if len(f) == 1:
        (e, c), = f.items()
        return MultiPoly(n, {tuple(p): c for p in multiset_permutations(list(e))})
    seen = {f}
    frontier = [f]
    while frontier:
        nxt = []
        for p in frontier:
            for i in range(n - 1):
                perm = list(range(n))
                perm[i], perm[i + 1] = i + 1, i
                q = permute(p, perm)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    out = MultiPoly._wrap(n, {})
    for p in seen:
        out = out + p
    return out


def msym(n: int, exps) -> MultiPoly:
    """sym of the monomial with exponents ``exps`` padded with zeros to n."""
    e = list(exps) + [0] * (n - len(exps))
    if len(e) > n:
        raise ValueError(f"monomial {tuple(exps)} needs more than {n} variables")
    return sym(MultiPoly.monomial(n, e))


# harmonic polynomials -----------------------------------------------------

def dim_hom(n: int, l: int) -> int:
    return comb(n + l - 1, l) if l >= 0 else 0


def dim_harm(n: int, l: int) -> int:
    return dim_hom(n, l) - dim_hom(n, l - 2)


@lru_cache(maxsize=None)
def harm_basis(n: int, l: int) -> tuple[MultiPoly, ...]:
    """A basis of the harmonic homogeneous polynomials of degree l.

    Each element is the unique harmonic polynomial whose part of degree
    <= 1 in x1 is a single monomial x1^eps * x'^b (eps in {0, 1}); the rest
    is x1^(2m+eps) * (-1)^m eps!/(2m+eps)! * Lap'^m(x'^b).
    """
    if n < 1 or l < 0:
        raise ValueError("need n >= 1 and l >= 0")
    out = []
    for eps in (0, 1):
        if l - eps < 0:
            continue
        for b in hom_exponents(n - 1, l - eps):
            if n == 1 and l - eps != 0:
                continue
            q = MultiPoly(n, {(0,) + b: 1})
            terms = {}
            m = 0
            while not q.is_zero():
                coef = Fraction((-1) ** m * factorial(eps), factorial(2 * m + eps))
                for e, c in q.items():
                    key = (2 * m + eps,) + e[1:]
                    terms[key] = terms.get(key, 0) + c * coef
                q = laplacian(q)
                m += 1
            out.append(MultiPoly(n, terms))
    out.sort(key=_seed, reverse=True)
    return tuple(out)


def _seed(p: MultiPoly):
    e = min((e for e in p._terms if e[0] <= 1), key=lambda e: e[0])
    return (sum(e), e)


def laplacian_matrix(n: int, l: int):
    """Matrix of the Laplacian Hom_l -> Hom_{l-2} in monomial bases (rows = targets)."""
    src = hom_exponents(n, l)
    dst = {e: i for i, e in enumerate(hom_exponents(n, l - 2))} if l >= 2 else {}
    rows = [[Fraction(0)] * len(src) for _ in dst]
    for j, e in enumerate(src):
        for i, a in enumerate(e):
            if a >= 2:
                g = list(e)
                g[i] -= 2
                rows[dst[tuple(g)]][j] += a * (a - 1)
    return rows, src


def from_vector(n: int, exps, vec) -> MultiPoly:
    return MultiPoly(n, {e: c for e, c in zip(exps, vec)})


def to_vector(f: MultiPoly, exps):
    return [f.coeff(e) for e in exps]


def grid_points(n: int, values):
    return list(product(values, repeat=n))
