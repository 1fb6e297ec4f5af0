"""Reflection groups of types A, B and D: roots, generators, corner vectors, orbits."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .scalar import MP, Quad, exact_sqrt, is_exact, is_zero, sqrt_rational, to_mpf, tolerance

DEFAULT_RANK_CAP = 10
MIN_RANK = {"A": 2, "B": 2, "D": 4}


def _dot(u, v):
    total = Fraction(0)
    for a, b in zip(u, v):
        if a != 0 and b != 0:
            total = total + a * b
    return total


def reflection_matrix(alpha):
    """I - 2 alpha alpha^T / |alpha|^2."""
    n = len(alpha)
    nrm = _dot(alpha, alpha)
    return tuple(
        tuple((1 if i == j else 0) - 2 * alpha[i] * alpha[j] / nrm for j in range(n))
        for i in range(n)
    )


def mat_vec(g, x):
    return tuple(_dot(row, x) for row in g)


def mat_mul(g, h):
    n = len(g)
    cols = [[h[k][j] for k in range(n)] for j in range(n)]
    return tuple(tuple(_dot(g[i], cols[j]) for j in range(n)) for i in range(n))


def transpose(g):
    return tuple(zip(*g))


def identity(n: int):
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class ReflectionGroup:
    dynkin_type: str
    n: int
    fundamental_roots: tuple
    generators: tuple
    exponents: tuple
    order: int

    @property
    def name(self) -> str:
        return f"{self.dynkin_type}{self.n}"

    @property
    def m2(self) -> int:
        return self.exponents[1]

    def __repr__(self):
        return f"ReflectionGroup({self.name})"


def _check_type(dynkin_type: str, n: int) -> str:
    t = str(dynkin_type).upper()
    if t not in MIN_RANK:
        raise ValueError(f"unsupported type {dynkin_type!r}; expected A, B or D")
    if n < MIN_RANK[t]:
        raise ValueError(f"type {t} needs rank >= {MIN_RANK[t]}, got {n}")
    return t


def a_root_entries(n: int):
    """(a, b) of the last A_n root [a, ..., a, b]."""
    s = sqrt_rational(n + 1)
    return (s - 1) / n, (s + n - 1) / n


_GROUP_CACHE: dict = {}


def build_group(dynkin_type: str, n: int) -> ReflectionGroup:
    t = _check_type(dynkin_type, n)
    key = (t, n)
    if key in _GROUP_CACHE:
        return _GROUP_CACHE[key]
    roots = []
    for i in range(n - 1):
        r = [Fraction(0)] * n
        r[i], r[i + 1] = Fraction(1), Fraction(-1)
        roots.append(tuple(r))
    if t == "A":
        a, b = a_root_entries(n)
        roots.append(tuple([a] * (n - 1) + [b]))
        exps = tuple(range(1, n + 1))
        order = factorial(n + 1)
    elif t == "B":
        # sqrt(2) e_n; the reflection only depends on the direction
        roots.append(tuple([Fraction(0)] * (n - 1) + [Fraction(1)]))
        exps = tuple(range(1, 2 * n, 2))
        order = 2 ** n * factorial(n)
    else:
        r = [Fraction(0)] * n
        r[n - 2] = r[n - 1] = Fraction(1)
        roots.append(tuple(r))
        exps = tuple(sorted(list(range(1, 2 * n - 2, 2)) + [n - 1]))
        order = 2 ** (n - 1) * factorial(n)
    gens = tuple(reflection_matrix(r) for r in roots)
    G = ReflectionGroup(t, n, tuple(roots), gens, exps, order)
    _GROUP_CACHE[key] = G
    return G


@dataclass(frozen=True)
class CornerVector:
    """Corner vector v_k as an exact ``scaled`` vector with squared norm ``norm2``.

    The unit vector is scaled / sqrt(norm2).
    """

    k: int
    scaled: tuple
    norm2: object

    @property
    def unit(self):
        root = exact_sqrt(self.norm2)
        if root is None and all(isinstance(x, (int, Fraction)) for x in self.scaled) \
                and isinstance(self.norm2, (int, Fraction)):
            root = sqrt_rational(self.norm2)
        if root is None:
            r = MP.sqrt(to_mpf(self.norm2))
            return tuple(to_mpf(x) / r for x in self.scaled)
        return tuple(x / root for x in self.scaled)


def corner_vectors(dynkin_type: str, n: int) -> list[CornerVector]:
    t = _check_type(dynkin_type, n)
    out = []
    if t == "A":
        s = sqrt_rational(n + 1)
        for k in range(1, n + 1):
            v = tuple([s + (n + 1 - k)] * k + [Fraction(-k)] * (n - k))
            out.append(CornerVector(k, v, _dot(v, v)))
        return out
    for k in range(1, n + 1):
        if t == "D" and k >= n - 1:
            v = [Fraction(1)] * n
            if k == n - 1:
                v[-1] = Fraction(-1)
        else:
            v = [Fraction(1)] * k + [Fraction(0)] * (n - k)
        out.append(CornerVector(k, tuple(v), Fraction(_dot(v, v))))
    return out


def corner_orbit_size(dynkin_type: str, n: int, k: int) -> int:
    """Closed-form N_k = |v_k^G|."""
    t = _check_type(dynkin_type, n)
    if not 1 <= k <= n:
        raise ValueError(f"corner index {k} out of range 1..{n}")
    if t == "A":
        return comb(n + 1, k)
    if t == "D" and k >= n - 1:
        return 2 ** (n - 1)
    return 2 ** k * comb(n, k)


@dataclass(frozen=True)
class Orbit:
    representative: tuple
    points: tuple
    norm2: object

    @property
    def size(self) -> int:
        return len(self.points)


class _FloatKeys:
    """Approximate set of big-float vectors using a rounding grid.

    Coordinates close to a cell boundary are also looked up in the
    neighbouring cell, so equal vectors always collide.
    """

    def __init__(self, tol):
        self.tol = tol
        self.cell = tol * 64
        self.table: dict = {}

    def _key(self, x):
        return tuple(int(MP.nint(v / self.cell)) for v in x)

    def _candidates(self, x):
        base = []
        for v in x:
            q = v / self.cell
            k = int(MP.nint(q))
            alt = [k]
            if abs(q - k) > MP.mpf(0.5) - 2 * self.tol / self.cell:
                alt.append(k + (1 if q > k else -1))
            base.append(alt)
        keys = [()]
        for alt in base:
            keys = [kk + (a,) for kk in keys for a in alt]
        return keys

    def contains(self, x) -> bool:
        for key in self._candidates(x):
            for y in self.table.get(key, ()):
                if all(abs(a - b) <= self.tol for a, b in zip(x, y)):
                    return True
        return False

    def add(self, x) -> None:
        self.table.setdefault(self._key(x), []).append(x)


def orbit(G: ReflectionGroup, x, cap: int | None = None) -> Orbit:
    """Breadth-first closure of x under the generators of G."""
    if len(x) != G.n:
        raise ValueError(f"vector has {len(x)} coordinates, group acts on {G.n}")
    if all(v == 0 for v in x):
        raise ValueError("orbit of the zero vector")
    limit = cap if cap is not None else G.order
    exact = all(is_exact(v) for v in x)
    if exact:
        x = tuple(Fraction(v) if isinstance(v, int) else v for v in x)
        gens = G.generators
        seen = {x}
        contains, add = seen.__contains__, seen.add
    else:
        x = tuple(to_mpf(v) for v in x)
        gens = tuple(tuple(tuple(to_mpf(e) for e in row) for row in g) for g in G.generators)
        scale = max(abs(v) for v in x)
        keys = _FloatKeys(tolerance() * max(scale, 1) * 16)
        keys.add(x)
        contains, add = keys.contains, keys.add
    points = [x]
    queue = deque([x])
    while queue:
        p = queue.popleft()
        for g in gens:
            q = mat_vec(g, p)
            if not contains(q):
                add(q)
                points.append(q)
                queue.append(q)
                if len(points) > limit:
                    raise RuntimeError(
                        f"orbit closure exceeded {limit} points; check tolerance settings")
    return Orbit(x, tuple(points), _dot(x, x))


@lru_cache(maxsize=None)
def corner_orbit(G: ReflectionGroup, k: int) -> Orbit:
    cv = corner_vectors(G.dynkin_type, G.n)[k - 1]
    return orbit(G, cv.scaled)


def molien_dims(G: ReflectionGroup, l_max: int) -> list[int]:
    """Coefficients q_0..q_lmax of prod_{i>=2} 1/(1 - t^(1+m_i))."""
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    q = [1] + [0] * l_max
    for m in G.exponents[1:]:
        d = m + 1
        for i in range(d, l_max + 1):
            q[i] += q[i - d]
    return q


def group_elements(G: ReflectionGroup, cap: int = 10 ** 6) -> list:
    """All elements of G as matrices, by closure over the generators."""
    if G.order > cap:
        raise ValueError(f"group order {G.order} exceeds the enumeration cap {cap}")
    e = identity(G.n)
    seen = {e}
    out = [e]
    queue = deque([e])
    while queue:
        h = queue.popleft()
        for g in G.generators:
            m = mat_mul(g, h)
            if m not in seen:
                seen.add(m)
                out.append(m)
                queue.append(m)
    if len(out) != G.order:
        raise RuntimeError(f"enumerated {len(out)} elements, expected {G.order}")
    return out


def a_orbit_oracle(n: int, k: int) -> set:
    """The A_n corner orbit as U1 u U2, in the scaled coordinates of corner_vectors.

    Scaled vectors are the unit ones times sqrt(k(n+1-k)) (1 + sqrt(n+1)).
    """
    from sympy.utilities.iterables import multiset_permutations

    s = sqrt_rational(n + 1)
    # c_k, d_k, c'_k, d'_k times sqrt(k(n+1-k)(n+2+2s)) = the common denominator
    c, d = s + (n + 1 - k), Fraction(-k)
    c2, d2 = Fraction(n + 1 - k), -(s + k)
    out = set()
    for vals, cnt in (((c, d), k), ((c2, d2), k - 1)):
        pattern = [0] * cnt + [1] * (n - cnt)
        for perm in multiset_permutations(pattern):
            out.add(tuple(vals[i] for i in perm))
    return out


def is_orthogonal(g) -> bool:
    n = len(g)
    for i in range(n):
        for j in range(n):
            s = _dot([g[k][i] for k in range(n)], [g[k][j] for k in range(n)])
            target = 1 if i == j else 0
            if is_exact(s):
                if s != target:
                    return False
            elif not is_zero(s - target):
                return False
    return True


__all__ = [
    "ReflectionGroup", "CornerVector", "Orbit", "build_group", "corner_vectors",
    "corner_orbit_size", "corner_orbit", "orbit", "molien_dims", "group_elements",
    "reflection_matrix", "mat_vec", "mat_mul", "transpose", "identity", "a_orbit_oracle",
    "is_orthogonal", "a_root_entries", "Quad", "DEFAULT_RANK_CAP",
]
