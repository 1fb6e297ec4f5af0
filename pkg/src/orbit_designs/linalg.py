"""Small dense linear algebra over exact fields and big floats."""

from __future__ import annotations

from fractions import Fraction

from .scalar import MP, Quad, is_exact, is_zero, to_mpf


def rref(rows, ncols: int):
    """Reduced row echelon form over an exact field.

    ``rows`` is a list of lists (entries int/Fraction/Quad).  Returns
    (reduced_rows, pivot_columns).
    """
    m = [list(r) for r in rows if any(x != 0 for x in r)]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        inv = p.inverse() if isinstance(p, Quad) else 1 / Fraction(p)
        m[r] = [x * inv if x != 0 else x for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b if b != 0 else a for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def nullspace(rows, ncols: int):
    """Basis of {v : A v = 0}, one vector per free column, exact arithmetic."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def rank(rows, ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def canonical_basis(vectors, ncols: int):
    """Row-reduce a spanning set so each vector's first nonzero entry is 1."""
    red, _ = rref(vectors, ncols)
    return red


def nullspace_numeric(rows, ncols: int, tol=None):
    """Null space of a big-float matrix via SVD; singular values below
    ``tol * sigma_max`` count as zero."""
    if not rows:
        return [[MP.mpf(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    a = MP.matrix([[to_mpf(x) for x in r] for r in rows])
    if a.rows < ncols:
        pad = MP.zeros(ncols - a.rows, ncols)
        a = MP.matrix([[a[i, j] for j in range(ncols)] for i in range(a.rows)]
                      + [[pad[i, j] for j in range(ncols)] for i in range(pad.rows)])
    _, s, v = MP.svd_r(a)
    smax = max([abs(s[i]) for i in range(len(s))] + [MP.mpf(0)])
    thresh = (tol if tol is not None else MP.mpf(2) ** (-MP.prec // 2)) * max(smax, 1)
    out = []
    for i in range(ncols):
        sv = s[i] if i < len(s) else MP.mpf(0)
        if abs(sv) <= thresh:
            out.append([v[i, j] for j in range(ncols)])
    return out


def solve_mixed_nullspace(rows, ncols: int):
    """Exact nullspace when every entry is exact, numeric otherwise."""
    if all(is_exact(x) for r in rows for x in r):
        return nullspace(rows, ncols), True
    return nullspace_numeric(rows, ncols), False


def is_zero_vector(v, scale=None) -> bool:
    return all(is_zero(x, scale) for x in v)
