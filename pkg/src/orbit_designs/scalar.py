"""Scalar domains: rationals, one real quadratic field, and big floats.

Rationals are plain :class:`fractions.Fraction` (or ``int``).  Elements
``a + b*sqrt(d)`` of a single real quadratic field are :class:`Quad`.  Big
floats are ``mpf`` values from the private context :data:`MP` (256 bits by
default), so the package never touches ``mpmath.mp`` global state.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath
from sympy import factorint

MP = mpmath.MPContext()
MP.prec = 256

_tolerance_exponent: int | None = None


class FieldMismatchError(ValueError):
    """Raised when two distinct quadratic extensions meet in one operation."""


def set_precision(bits: int, tolerance_exponent: int | None = None) -> None:
    if bits < 64:
        raise ValueError("precision must be at least 64 bits")
    global _tolerance_exponent
    MP.prec = bits
    _tolerance_exponent = tolerance_exponent


def precision() -> int:
    return MP.prec


def tolerance():
    """Zero-test threshold for big-float values, 2**-(precision/2) by default."""
    e = _tolerance_exponent if _tolerance_exponent is not None else MP.prec // 2
    return MP.mpf(2) ** (-e)


@lru_cache(maxsize=None)
def squarefree_split(m: int) -> tuple[int, int]:
    """Return (s, d) with m = s**2 * d and d square-free (m > 0)."""
    if m <= 0:
        raise ValueError("expected a positive integer")
    s, d = 1, 1
    for p, e in factorint(m).items():
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return s, d


def _norm_triple(a: int, b: int, c: int) -> tuple[int, int, int]:
    if c < 0:
        a, b, c = -a, -b, -c
    g = math.gcd(math.gcd(a, b), c)
    if g > 1:
        a, b, c = a // g, b // g, c // g
    return a, b, c


class Quad:
    """An element (a + b*sqrt(d)) / c of Q(sqrt(d)), stored with integers.

    ``d`` is a square-free integer > 1.  Arithmetic results whose radical
    part vanishes collapse to :class:`Fraction`; mixing two different
    fields raises :class:`FieldMismatchError`.
    """

    __slots__ = ("_a", "_b", "_c", "d")

    def __init__(self, a, b, d: int):
        a, b = Fraction(a), Fraction(b)
        if d < 2 or squarefree_split(d)[0] != 1:
            raise ValueError(f"d must be square-free and > 1, got {d}")
        c = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        self._a, self._b, self._c = _norm_triple(
            a.numerator * (c // a.denominator), b.numerator * (c // b.denominator), c
        )
        self.d = d

    @classmethod
    def _raw(cls, a: int, b: int, c: int, d: int):
        if b == 0:
            return Fraction(a, c)
        q = object.__new__(cls)
        q._a, q._b, q._c = _norm_triple(a, b, c)
        q.d = d
        return q

    @property
    def a(self) -> Fraction:
        return Fraction(self._a, self._c)

    @property
    def b(self) -> Fraction:
        return Fraction(self._b, self._c)

    def _coerce(self, other):
        # -> (a, b, c) over this field, or None
        if isinstance(other, Quad):
            if other._b == 0:
                return other._a, 0, other._c
            if self._b == 0:
                return other._a, other._b, other._c
            if other.d != self.d:
                raise FieldMismatchError(f"Q(sqrt({self.d})) vs Q(sqrt({other.d}))")
            return other._a, other._b, other._c
        if isinstance(other, int):
            return other, 0, 1
        if isinstance(other, Fraction):
            return other.numerator, 0, other.denominator
        return None

    def _field(self, other) -> int:
        if isinstance(other, Quad) and self._b == 0:
            return other.d
        return self.d

    def __add__(self, other):
        if isinstance(other, mpmath.ctx_mp_python.mpnumeric):
            return to_mpf(self) + other
        t = self._coerce(other)
        if t is None:
            return NotImplemented
        a, b, c = t
        return Quad._raw(self._a * c + a * self._c, self._b * c + b * self._c,
                         self._c * c, self._field(other))

    __radd__ = __add__

    def __neg__(self):
        return Quad._raw(-self._a, -self._b, self._c, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, mpmath.ctx_mp_python.mpnumeric):
            return to_mpf(self) * other
        t = self._coerce(other)
        if t is None:
            return NotImplemented
        a, b, c = t
        d = self._field(other)
        return Quad._raw(self._a * a + d * self._b * b, self._a * b + self._b * a,
                         self._c * c, d)

    __rmul__ = __mul__

    def inverse(self):
        n = self._a * self._a - self.d * self._b * self._b
        if n == 0:
            raise ZeroDivisionError("Quad division by zero")
        # c / (a + b sqrt d) = c (a - b sqrt d) / n
        return Quad._raw(self._c * self._a, -self._c * self._b, n, self.d)

    def __truediv__(self, other):
        if isinstance(other, mpmath.ctx_mp_python.mpnumeric):
            return to_mpf(self) / other
        if isinstance(other, Quad):
            if other._b == 0:
                return self * Fraction(other._c, other._a)
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, mpmath.ctx_mp_python.mpnumeric):
            return other / to_mpf(self)
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result, base = Fraction(1), self
        while e:
            if e & 1:
                result = base * result
            e >>= 1
            if e:
                base = base * base
        return result

    def conjugate(self):
        return Quad._raw(self._a, -self._b, self._c, self.d)

    def norm(self) -> Fraction:
        return Fraction(self._a * self._a - self.d * self._b * self._b, self._c * self._c)

    def sign(self) -> int:
        a, b = self._a, self._b
        if a >= 0 and b >= 0:
            return 0 if (a == 0 and b == 0) else 1
        if a <= 0 and b <= 0:
            return -1
        big = a * a - self.d * b * b
        if big == 0:
            return 0
        # the larger of |a| and |b| sqrt(d) decides
        return (1 if a > 0 else -1) if big > 0 else (1 if b > 0 else -1)

    def __eq__(self, other):
        if isinstance(other, Quad):
            if self._b == 0 or other._b == 0:
                return self._b == other._b and self._a * other._c == other._a * self._c
            return (self.d, self._a, self._b, self._c) == (other.d, other._a, other._b, other._c)
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and Fraction(self._a, self._c) == other
        if isinstance(other, mpmath.ctx_mp_python.mpnumeric):
            return to_mpf(self) == other
        return NotImplemented

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._c))
        return hash((self._a, self._b, self._c, self.d))

    def _cmp(self, other) -> int:
        return sign(self - other)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self._a != 0 or self._b != 0

    def __float__(self):
        return float(to_mpf(self))

    def __repr__(self):
        return f"Quad({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return format_scalar(self)


def sqrt_rational(x) -> Fraction | Quad:
    """Exact sqrt of a non-negative rational, as a rational or a Quad."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("square root of a negative rational")
    if x == 0:
        return Fraction(0)
    # sqrt(p/q) = sqrt(p*q)/q
    s, d = squarefree_split(x.numerator * x.denominator)
    if d == 1:
        return Fraction(s, x.denominator)
    return Quad(0, Fraction(s, x.denominator), d)


def exact_sqrt(x):
    """Square root of x inside x's own field, or None if it is not a square there."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        if x < 0:
            return None
        p, q = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if p * p == x.numerator and q * q == x.denominator:
            return Fraction(p, q)
        return None
    if isinstance(x, Quad):
        if x.b == 0:
            return exact_sqrt(x.a)
        if x.sign() <= 0:
            return None
        n0 = exact_sqrt(x.norm())
        if n0 is None:
            return None
        for cand in ((x.a + n0) / 2, (x.a - n0) / 2):
            p = exact_sqrt(cand)
            if p:
                q = x.b / (2 * p)
                root = Quad(p, q, x.d)
                return root if root.sign() > 0 else -root
        return None
    return None


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, Quad))


def to_mpf(x):
    if isinstance(x, Quad):
        return (MP.mpf(x._a) + MP.mpf(x._b) * MP.sqrt(x.d)) / x._c
    if isinstance(x, Fraction):
        return MP.mpf(x.numerator) / x.denominator
    return MP.mpf(x)


def sign(x) -> int:
    if isinstance(x, Quad):
        return x.sign()
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    if is_zero(x):
        return 0
    return 1 if x > 0 else -1


def is_zero(x, scale=None) -> bool:
    """Exact test for exact scalars; relative tolerance test for big floats."""
    if is_exact(x):
        return x == 0
    bound = tolerance() * (to_mpf(scale) if scale is not None else 1)
    return abs(x) <= bound


def common_field(values) -> int:
    """The d of the single quadratic field shared by ``values`` (1 for Q)."""
    d = 1
    for v in values:
        if isinstance(v, Quad) and v.b != 0:
            if d not in (1, v.d):
                raise FieldMismatchError(f"Q(sqrt({d})) vs Q(sqrt({v.d}))")
            d = v.d
    return d


def parse_scalar(text: str):
    """Parse ``"27/25"``, ``"1+2*sqrt(5)"``, ``"sqrt(8/5)"`` or a decimal."""
    import sympy

    s = str(text).strip()
    expr = sympy.sympify(s, rational=True)
    return from_sympy(expr)


def from_sympy(expr):
    """Convert a sympy number a + b*sqrt(d) to Fraction/Quad, else mpf."""
    import sympy

    expr = sympy.nsimplify(expr) if expr.is_Float else sympy.radsimp(expr)
    if expr.is_Rational:
        return Fraction(int(expr.p), int(expr.q))
    a, b, d = Fraction(0), Fraction(0), None
    for term in sympy.Add.make_args(sympy.expand(expr)):
        coeff, rest = term.as_coeff_Mul()
        if rest == 1:
            a += Fraction(int(coeff.p), int(coeff.q))
            continue
        if rest.is_Pow and rest.exp == sympy.Rational(1, 2) and rest.base.is_Integer:
            m = int(rest.base)
            s, dd = squarefree_split(m)
            if d not in (None, dd):
                break
            d = dd
            b += Fraction(int(coeff.p), int(coeff.q)) * s
            continue
        break
    else:
        if d is None:
            return a
        return Quad(a, b, d)
    return MP.mpf(str(sympy.N(expr, int(MP.dps) + 10)))


def to_sympy(x):
    import sympy

    if isinstance(x, Quad):
        return sympy.Rational(x._a, x._c) + sympy.Rational(x._b, x._c) * sympy.sqrt(x.d)
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.Float(mpmath.nstr(x, int(MP.dps)), int(MP.dps))


def format_scalar(x, digits: int = 30) -> str:
    """Exact string for exact scalars (``"1/2+3*sqrt(5)"``), decimal otherwise."""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Quad):
        a, b = x.a, x.b
        rad = f"sqrt({x.d})"
        bpart = rad if b == 1 else f"-{rad}" if b == -1 else f"{b}*{rad}"
        if a == 0:
            return bpart
        return f"{a}{'' if bpart.startswith('-') else '+'}{bpart}"
    return MP.nstr(x, digits)


def scalar_mode(x) -> str:
    if isinstance(x, (int, Fraction)):
        return "rational"
    if isinstance(x, Quad):
        return "quadratic"
    return "bigfloat"


class SurdSum:
    """A sum of terms c * sqrt(m) with c, m in one exact field (m > 0).

    Terms whose radicands differ by a square factor are merged, so the
    stored radicands lie in pairwise distinct square classes.  Square roots
    of distinct square classes are linearly independent over the base
    field, which makes :meth:`is_zero` an exact test.
    """

    def __init__(self):
        self.groups: list[list] = []  # [radicand, coefficient]
        self.magnitude = MP.mpf(0)

    def add(self, coeff, radicand=1) -> None:
        if coeff == 0:
            return
        if isinstance(radicand, int):
            radicand = Fraction(radicand)
        self.magnitude += abs(to_mpf(coeff)) * MP.sqrt(to_mpf(radicand))
        for g in self.groups:
            r = exact_sqrt(radicand / g[0])
            if r is not None:
                g[1] = g[1] + coeff * r
                return
        self.groups.append([radicand, coeff])

    def is_zero(self) -> bool:
        return all(c == 0 for _, c in self.groups)

    def value(self):
        return MP.fsum(to_mpf(c) * MP.sqrt(to_mpf(m)) for m, c in self.groups)

    def exact_value(self):
        """The sum as a field element when every radicand is a square, else None."""
        total = Fraction(0)
        for m, c in self.groups:
            r = exact_sqrt(m)
            if r is None:
                if c == 0:
                    continue
                return None
            total = total + c * r
        return total
