"""Exact rational linear algebra and the small amount of complex numerics we need.

Rational matrices are plain lists of rows of :class:`fractions.Fraction`.
Nothing here mutates its arguments.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Vector = tuple[Fraction, ...]
Matrix = list[list[Fraction]]


class DegenerateError(ValueError):
    """Raised when an operation needs full rank and does not get it."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("refusing to convert a float to an exact rational")
    return Fraction(x)


def vector(entries: Iterable) -> Vector:
    return tuple(as_fraction(x) for x in entries)


def matrix(rows: Iterable[Iterable]) -> Matrix:
    out = [[as_fraction(x) for x in row] for row in rows]
    if not out or not out[0]:
        raise ValueError("matrix dimensions must be positive")
    width = len(out[0])
    if any(len(r) != width for r in out):
        raise ValueError("ragged matrix")
    return out


def from_columns(columns: Sequence[Sequence]) -> Matrix:
    cols = [vector(c) for c in columns]
    return [list(row) for row in zip(*cols)]


def transpose(m: Sequence[Sequence[Fraction]]) -> Matrix:
    return [list(r) for r in zip(*m)]


def _bareiss(m: Matrix) -> tuple[Matrix, list[int], int]:
    """Fraction-free elimination on a copy of ``m``.

    Returns the reduced matrix, its pivot columns and the number of row swaps.
    Entries are kept as Fractions so rational input works directly; for integer
    input every intermediate stays integral.
    """
    a = [row[:] for row in m]
    rows, cols = len(a), len(a[0])
    prev = Fraction(1)
    pivots: list[int] = []
    swaps = 0
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
            swaps += 1
        piv = a[r][c]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                a[i][j] = (a[i][j] * piv - a[i][c] * a[r][j]) / prev
            a[i][c] = Fraction(0)
        prev = piv
        pivots.append(c)
        r += 1
    return a, pivots, swaps


def rank(m: Sequence[Sequence]) -> int:
    if not m or not m[0]:
        return 0
    _, pivots, _ = _bareiss(matrix(m))
    return len(pivots)


def det(m: Sequence[Sequence]) -> Fraction:
    a = matrix(m)
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError(f"det needs a square matrix, got {n}x{len(a[0])}")
    red, pivots, swaps = _bareiss(a)
    if len(pivots) < n:
        return Fraction(0)
    d = red[n - 1][n - 1]
    return -d if swaps % 2 else d


def rref(m: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form with the pivot column list; zero rows dropped."""
    a = matrix(m)
    rows, cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a[:r], pivots


def span_key(vectors: Sequence[Sequence]) -> tuple[Vector, ...]:
    """Canonical hashable key of the span of ``vectors`` (its RREF rows)."""
    rows, _ = rref(vectors)
    return tuple(tuple(r) for r in rows)


def span_membership(v: Sequence, basis: Sequence[Sequence]) -> bool:
    v = vector(v)
    if not basis:
        return all(x == 0 for x in v)
    if any(len(b) != len(v) for b in basis):
        raise ValueError("basis vectors and v must have equal length")
    return rank(list(basis) + [v]) == rank(basis)


def reduce_mod_span(v: Sequence, echelon: Matrix, pivots: Sequence[int]) -> Vector:
    """Subtract from ``v`` the combination of RREF rows matching its pivot entries."""
    out = list(vector(v))
    for row, c in zip(echelon, pivots):
        f = out[c]
        if f:
            out = [x - f * y for x, y in zip(out, row)]
    return tuple(out)


def solve_in_basis(v: Sequence, basis: Sequence[Sequence]) -> Vector:
    """Coordinates of ``v`` in the linearly independent list ``basis`` (exact)."""
    k = len(basis)
    aug = [list(col) + [x] for col, x in zip(zip(*[vector(b) for b in basis]), vector(v))]
    red, pivots = rref(aug)
    if k in pivots or len(pivots) < k:
        raise DegenerateError("vector not in span, or basis dependent")
    return tuple(red[i][k] for i in range(k))


def nullspace(m: Sequence[Sequence]) -> list[Vector]:
    """Exact basis of {x : m x = 0}."""
    a = matrix(m)
    cols = len(a[0])
    red, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * cols
        x[f] = Fraction(1)
        for row, c in zip(red, pivots):
            x[c] = -row[f]
        basis.append(tuple(x))
    return basis


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def inverse(m: Sequence[Sequence]) -> Matrix:
    a = matrix(m)
    n = len(a)
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise DegenerateError("matrix is singular")
    return [row[n:] for row in red]


# -- arithmetic over F_p ----------------------------------------------------


def rank_mod_p(m: Sequence[Sequence[int]], p: int) -> int:
    a = [[int(x) % p for x in row] for row in m]
    if not a or not a[0]:
        return 0
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r


def span_key_mod_p(vectors: Sequence[Sequence[int]], p: int) -> tuple[tuple[int, ...], ...]:
    a = [[int(x) % p for x in row] for row in vectors]
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return tuple(tuple(row) for row in a[:r])


# -- complex floating point ---------------------------------------------------


def complex_qr_orthogonalize(m: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Orthonormal factor Q of the columns of ``m`` (Gram-Schmidt order).

    Column phases are fixed so that the diagonal of R is real and positive,
    which makes the result unique.
    """
    a = np.asarray(m, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite entries")
    q, r = np.linalg.qr(a)
    diag = np.diag(r)
    scale = max(np.abs(diag).max(), 1.0) if diag.size else 1.0
    if diag.size < a.shape[1] or np.any(np.abs(diag) <= rtol * scale):
        raise DegenerateError("columns are linearly dependent")
    phases = diag / np.abs(diag)
    return q * phases[np.newaxis, :]
