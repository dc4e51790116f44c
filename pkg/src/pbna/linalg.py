"""Dense matrices over GF(2^m) as lists of rows of ints."""

from __future__ import annotations

from typing import Sequence

from .field import Field

Matrix = list[list[int]]


class DecodeFailure(ArithmeticError):
    """A linear system that had to be uniquely solvable was singular."""


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def shape(M: Sequence[Sequence[int]]) -> tuple[int, int]:
    return len(M), (len(M[0]) if M else 0)


def transpose(M: Sequence[Sequence[int]]) -> Matrix:
    return [list(col) for col in zip(*M)]


def hstack(*blocks: Sequence[Sequence[int]]) -> Matrix:
    return [sum((list(b[i]) for b in blocks), []) for i in range(len(blocks[0]))]


def columns(M: Sequence[Sequence[int]], idx: Sequence[int]) -> Matrix:
    return [[row[j] for j in idx] for row in M]


def matmul(f: Field, X: Sequence[Sequence[int]], Y: Sequence[Sequence[int]]) -> Matrix:
    if X and len(X[0]) != len(Y):
        raise ValueError(f"shape mismatch {shape(X)} @ {shape(Y)}")
    Yt = transpose(Y) if Y else []
    return [[f.dot(row, col) for col in Yt] for row in X]


def matvec(f: Field, M: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [f.dot(row, v) for row in M]


def add(X: Sequence[Sequence[int]], Y: Sequence[Sequence[int]]) -> Matrix:
    return [[a ^ b for a, b in zip(rx, ry)] for rx, ry in zip(X, Y)]


def diag_mul(f: Field, d: Sequence[int], M: Sequence[Sequence[int]]) -> Matrix:
    """``diag(d) @ M`` without forming the diagonal matrix."""
    return [[f.mul(di, x) for x in row] for di, row in zip(d, M)]


def _row_reduce(f: Field, M: Matrix, ncols: int) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over the first ``ncols`` columns (in place)."""
    pivots: list[int] = []
    r = 0
    nrows = len(M)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = f.inv(M[r][c])
        M[r] = [f.mul(inv, x) for x in M[r]]
        for i in range(nrows):
            if i != r and M[i][c]:
                k = M[i][c]
                M[i] = [a ^ f.mul(k, b) for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(f: Field, M: Sequence[Sequence[int]]) -> int:
    if not M:
        return 0
    _, piv = _row_reduce(f, [list(r) for r in M], len(M[0]))
    return len(piv)


def rank_and_solve(
    f: Field, M: Sequence[Sequence[int]], b: Sequence[int] | None = None
) -> tuple[int, list[int] | None]:
    """Rank of ``M`` and, when ``b`` is given, the unique solution of ``M x = b``.

    Raises ``DecodeFailure`` if ``b`` is given and the system has no unique
    solution.
    """
    rows, cols = shape(M)
    if b is None:
        return rank(f, M), None
    if len(b) != rows:
        raise ValueError(f"rhs length {len(b)} != {rows} rows")
    aug = [list(r) + [bi] for r, bi in zip(M, b)]
    red, piv = _row_reduce(f, aug, cols)
    rk = len(piv)
    if rk < cols:
        raise DecodeFailure(f"singular system: rank {rk} < {cols} unknowns")
    if any(red[i][cols] for i in range(rk, rows)):
        raise DecodeFailure("inconsistent system")
    return rk, [red[i][cols] for i in range(cols)]


def inverse(f: Field, M: Sequence[Sequence[int]]) -> Matrix:
    n = len(M)
    aug = [list(r) + e for r, e in zip(M, identity(n))]
    red, piv = _row_reduce(f, aug, n)
    if len(piv) < n:
        raise DecodeFailure("matrix is singular")
    return [row[n:] for row in red]


def det(f: Field, M: Sequence[Sequence[int]]) -> int:
    """Determinant by elimination (characteristic 2: row swaps keep the sign)."""
    A = [list(r) for r in M]
    n = len(A)
    d = 1
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c]), None)
        if p is None:
            return 0
        A[c], A[p] = A[p], A[c]
        d = f.mul(d, A[c][c])
        inv = f.inv(A[c][c])
        for i in range(c + 1, n):
            if A[i][c]:
                k = f.mul(A[i][c], inv)
                A[i] = [a ^ f.mul(k, b) for a, b in zip(A[i], A[c])]
    return d
