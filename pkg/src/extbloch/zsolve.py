"""Exact integer linear algebra on lists of Python ints.

Matrices are plain ``list[list[int]]``; Python's unbounded integers absorb
coefficient growth.
"""

from __future__ import annotations

from typing import Optional, Sequence

IntMatrix = list[list[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence[int]], ncols: Optional[int] = None) -> IntMatrix:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence[int]], x: Sequence[int]) -> list[int]:
    return [sum(c * v for c, v in zip(row, x)) for row in a]


def _ncols(a) -> int:
    return len(a[0]) if a else 0


def hermite_normal_form(a: Sequence[Sequence[int]], ncols: Optional[int] = None):
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U @ A == H``, ``U`` unimodular, ``H`` in row
    echelon form with positive pivots and the entries above each pivot
    reduced into ``[0, pivot)``.
    """
    h = [[int(v) for v in row] for row in a]
    m = len(h)
    n = _ncols(h) if ncols is None else ncols
    u = identity(m)
    row = 0
    for col in range(n):
        if row >= m:
            break
        # Euclid on the column below `row`
        while True:
            nonzero = [i for i in range(row, m) if h[i][col] != 0]
            if not nonzero:
                break
            piv = min(nonzero, key=lambda i: (abs(h[i][col]), i))
            if piv != row:
                h[row], h[piv] = h[piv], h[row]
                u[row], u[piv] = u[piv], u[row]
            done = True
            for i in range(row + 1, m):
                if h[i][col]:
                    f = h[i][col] // h[row][col]
                    h[i] = [x - f * y for x, y in zip(h[i], h[row])]
                    u[i] = [x - f * y for x, y in zip(u[i], u[row])]
                    if h[i][col]:
                        done = False
            if done:
                break
        if h[row][col] == 0:
            continue
        if h[row][col] < 0:
            h[row] = [-x for x in h[row]]
            u[row] = [-x for x in u[row]]
        pivot = h[row][col]
        for i in range(row):
            f = h[i][col] // pivot
            if f:
                h[i] = [x - f * y for x, y in zip(h[i], h[row])]
                u[i] = [x - f * y for x, y in zip(u[i], u[row])]
        row += 1
    return h, u


def int_det(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    m = [[int(v) for v in row] for row in a]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def solve_integer(a: Sequence[Sequence[int]], b: Sequence[int], ncols: Optional[int] = None):
    """Solve ``A x = b`` over the integers.

    Returns ``(x0, kernel)`` where ``kernel`` is a Z-basis of the integer
    null space, or ``None`` when no integer solution exists.
    """
    m = len(a)
    n = _ncols(a) if ncols is None else ncols
    if len(b) != m:
        raise ValueError("dimension mismatch")
    # column operations on A: U A^T = H, so A U^T = H^T is lower echelon
    h, u = hermite_normal_form(transpose(a, n) if m else [[] for _ in range(n)], m)
    y = [0] * n
    residual = [int(v) for v in b]
    rank = 0
    for r in range(n):
        lead = next((c for c in range(m) if h[r][c] != 0), None)
        if lead is None:
            break
        # column r of A U^T is row r of h; it starts at row `lead`
        if residual[lead] % h[r][lead]:
            return None
        y[r] = residual[lead] // h[r][lead]
        if y[r]:
            residual = [res - y[r] * hv for res, hv in zip(residual, h[r])]
        rank += 1
    if any(residual):
        return None
    # x = U^T y
    x0 = [sum(u[r][j] * y[r] for r in range(n)) for j in range(n)]
    kernel = [list(u[r]) for r in range(rank, n)]
    return x0, kernel


def solve_mod2(a: Sequence[Sequence[int]], b: Sequence[int], ncols: Optional[int] = None):
    """Solve ``A x = b`` over GF(2); lexicographically least solution or ``None``."""
    n = _ncols(a) if ncols is None else ncols
    rows = [([v & 1 for v in row], bv & 1) for row, bv in zip(a, b)]
    fixed: list[tuple[list[int], int]] = []
    x = []
    for i in range(n):
        trial = fixed + [([int(j == i) for j in range(n)], 0)]
        if _consistent_mod2(rows + trial, n):
            fixed = trial
            x.append(0)
        else:
            fixed = fixed + [([int(j == i) for j in range(n)], 1)]
            x.append(1)
    if not _consistent_mod2(rows + fixed, n):
        return None
    return x


def _consistent_mod2(rows, n) -> bool:
    mat = [row[:] + [rhs] for row, rhs in rows]
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                mat[i] = [x ^ y for x, y in zip(mat[i], mat[r])]
        r += 1
    return not any(row[n] and not any(row[:n]) for row in mat)


def nullspace_mod2(a: Sequence[Sequence[int]], ncols: Optional[int] = None) -> list[list[int]]:
    """Basis of the GF(2) null space, from the reduced row echelon form."""
    n = _ncols(a) if ncols is None else ncols
    mat = [[v & 1 for v in row] for row in a]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                mat[i] = [x ^ y for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    basis = []
    for free in (c for c in range(n) if c not in pivots):
        v = [0] * n
        v[free] = 1
        for i, pc in enumerate(pivots):
            v[pc] = mat[i][free]
        basis.append(v)
    return basis
