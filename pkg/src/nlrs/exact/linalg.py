"""Small exact matrices over the rationals (lists of lists of Fraction)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import Polynomial

Matrix = list[list[Fraction]]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in a]


def mat_vec(a: Matrix, v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def kronecker(a: Matrix, b: Matrix) -> Matrix:
    n, m = len(a), len(b)
    return [[a[i // m][j // m] * b[i % m][j % m] for j in range(n * m)] for i in range(n * m)]


def kronecker_sum(a: Matrix, b: Matrix) -> Matrix:
    """A (x) I + I (x) B, whose eigenvalues are all sums of eigenvalues."""
    n, m = len(a), len(b)
    left = kronecker(a, identity(m))
    right = kronecker(identity(n), b)
    return [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(left, right)]


def companion(poly: Polynomial) -> Matrix:
    """Frobenius companion of a monic polynomial (last column holds -coeffs)."""
    p = poly.monic()
    n = p.degree
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(1, n):
        m[i][i - 1] = Fraction(1)
    for i in range(n):
        m[i][n - 1] = -p.coeffs[i]
    return m


def charpoly(a: Matrix) -> Polynomial:
    """det(xI - A) via reduction to upper Hessenberg form, O(n^3) exact steps."""
    n = len(a)
    h = [row[:] for row in a]
    for k in range(1, n - 1):
        piv = next((i for i in range(k, n) if h[i][k - 1] != 0), None)
        if piv is None:
            continue
        if piv != k:
            h[k], h[piv] = h[piv], h[k]
            for row in h:
                row[k], row[piv] = row[piv], row[k]
        for i in range(k + 1, n):
            f = h[i][k - 1] / h[k][k - 1]
            if f == 0:
                continue
            for j in range(n):
                h[i][j] -= f * h[k][j]
            for row in h:
                row[k] += f * row[i]
    # recurrence over leading principal submatrices of the Hessenberg form
    polys = [Polynomial([1])]
    for m in range(1, n + 1):
        p = Polynomial([-h[m - 1][m - 1], 1]) * polys[m - 1]
        prod = Fraction(1)
        for i in range(1, m):
            prod *= h[m - i][m - i - 1]
            p = p - Polynomial([prod * h[m - i - 1][m - 1]]) * polys[m - i - 1]
        polys.append(p)
    return polys[n]


def solve(a: Matrix, b: Sequence[Fraction]) -> list[Fraction]:
    """Gaussian elimination; raises ValueError on a singular system."""
    n = len(a)
    m = [list(row) + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular system")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]
