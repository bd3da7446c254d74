"""Exact matrix routines over DiffRational and Poly entries.

Determinants use cofactor expansion up to size 4 and fraction-free
(Bareiss) elimination above.  Pivoting is deterministic: the first
structurally nonzero entry in the pivot column.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence

from .diffcore import ONE, ZERO, DiffRational, Poly, ZeroDenominator, _den_power

Matrix = List[List[DiffRational]]

COFACTOR_LIMIT = 4


def identity(m: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]


def matmul(a: Sequence[Sequence[DiffRational]], b: Sequence[Sequence[DiffRational]]) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = ZERO
            for k in range(inner):
                if a[i][k].is_zero() or b[k][j].is_zero():
                    continue
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def matvec(a: Sequence[Sequence[DiffRational]], v: Sequence[DiffRational]) -> List[DiffRational]:
    return [r[0] for r in matmul(a, [[x] for x in v])]


def _cofactor_det(mat: Sequence[Sequence[DiffRational]]) -> DiffRational:
    n = len(mat)
    memo = {}

    def minor(row: int, cols: tuple) -> DiffRational:
        if row == n - 1:
            return mat[row][cols[0]]
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = ZERO
        for idx, c in enumerate(cols):
            entry = mat[row][c]
            if entry.is_zero():
                continue
            sub = minor(row + 1, cols[:idx] + cols[idx + 1:])
            if sub.is_zero():
                continue
            term = entry * sub
            acc = acc - term if idx % 2 else acc + term
        memo[key] = acc
        return acc

    return minor(0, tuple(range(n)))


def clear_row(row: Sequence[DiffRational]):
    """(polys, multiplier) with polys[k] == multiplier * row[k]; multiplier is a Poly."""
    lcm = {}
    for e in row:
        for f, k in e.den.items():
            if lcm.get(f, 0) < k:
                lcm[f] = k
    mult = _den_power(lcm, {})
    return [e.num * _den_power(lcm, e.den) for e in row], mult


def bareiss(polys: List[List[Poly]], want_det: bool = False):
    """Fraction-free row echelon form in place; returns (rank, det-or-None)."""
    rows = len(polys)
    cols = len(polys[0]) if rows else 0
    prev = Poly.const(1)
    r = 0
    sign = 1
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if polys[i][c]), None)
        if piv is None:
            if want_det:
                return r, Poly()
            continue
        if piv != r:
            polys[r], polys[piv] = polys[piv], polys[r]
            sign = -sign
        p = polys[r][c]
        for i in range(r + 1, rows):
            a = polys[i][c]
            for j in range(c + 1, cols):
                v = p * polys[i][j] - a * polys[r][j]
                if v and not prev.is_const():
                    q = v.divexact(prev)
                    if q is None:
                        raise ArithmeticError("Bareiss division was not exact")
                    v = q
                elif v:
                    v = v.scale(Fraction(1) / prev.const_value())
                polys[i][j] = v
            polys[i][c] = Poly()
        prev = p
        r += 1
    det = None
    if want_det:
        det = polys[rows - 1][cols - 1] if r == rows else Poly()
        if sign < 0:
            det = -det
    return r, det


def det(mat: Sequence[Sequence[DiffRational]]) -> DiffRational:
    n = len(mat)
    if n == 0:
        return ONE
    if any(len(row) != n for row in mat):
        raise ValueError("determinant of a non-square matrix")
    if n <= COFACTOR_LIMIT:
        return _cofactor_det(mat)
    polys = []
    mult = Poly.const(1)
    for row in mat:
        pr, mr = clear_row(row)
        polys.append(pr)
        mult = mult * mr
    _, d = bareiss(polys, want_det=True)
    if not d:
        return ZERO
    return (DiffRational.from_poly(d) / DiffRational.from_poly(mult)).cancel()


def minor_matrix(mat: Sequence[Sequence[DiffRational]], row: int, col: int) -> Matrix:
    return [[mat[i][j] for j in range(len(mat)) if j != col] for i in range(len(mat)) if i != row]


def adjugate(mat: Sequence[Sequence[DiffRational]]) -> Matrix:
    n = len(mat)
    if n == 1:
        return [[ONE]]
    adj = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            c = det(minor_matrix(mat, i, j))
            adj[j][i] = -c if (i + j) % 2 else c
    return adj


def inverse(mat: Sequence[Sequence[DiffRational]]) -> Matrix:
    d = det(mat)
    if d.is_zero():
        raise ZeroDenominator("singular matrix")
    return [[(e / d).cancel() for e in row] for row in adjugate(mat)]


def rank(mat: Sequence[Sequence[DiffRational]]) -> int:
    """Exact rank over the rational function field."""
    if not mat or not mat[0]:
        return 0
    polys = [clear_row(row)[0] for row in mat]
    # drop all-zero columns before elimination
    keep = [j for j in range(len(polys[0])) if any(r[j] for r in polys)]
    polys = [[r[j] for j in keep] for r in polys]
    if not keep:
        return 0
    r, _ = bareiss(polys)
    return r


def rank_q(mat: Sequence[Sequence]) -> int:
    """Rank of a matrix of exact rationals."""
    m = [[Fraction(v) for v in row] for row in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, rows):
            f = m[i][c] / p
            if f:
                for j in range(c, cols):
                    m[i][j] -= f * m[r][j]
        r += 1
        if r == rows:
            break
    return r


def nullspace(mat: Sequence[Sequence[DiffRational]]) -> List[List[DiffRational]]:
    """Basis of the right kernel by Gauss-Jordan over DiffRational."""
    m = [list(row) for row in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [(v / p).cancel() for v in m[r]]
        for i in range(rows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [(m[i][j] - f * m[r][j]).cancel() for j in range(cols)]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * cols
        v[fc] = ONE
        for k, pc in enumerate(pivots):
            v[pc] = -m[k][fc]
        basis.append(v)
    return basis


def first_nonzero(vec: Sequence[DiffRational]) -> Optional[int]:
    return next((i for i, v in enumerate(vec) if not v.is_zero()), None)
