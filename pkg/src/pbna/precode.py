"""Construction of the alignment solution (V1, A, B, C).

``V1`` must satisfy ``diag(eta) V1 C = V1 B A``.  Each row of ``V1`` is a
left-kernel vector ``r(z)`` of ``zC - BA`` evaluated at that slot's eta
value.  The canonical choice gives ``r(z) = (1, z, ..., z^n)``; for
general ``A, B, C`` the kernel vector is assembled from ``n x n``
polynomial minors (Cramer's rule with the last coordinate fixed).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from . import linalg
from .field import Field
from .linalg import Matrix


class PrecodingError(ValueError):
    """Invalid inputs for the alignment construction."""


class ZPoly:
    """Univariate polynomial over GF(2^m); ``coeffs[k]`` multiplies ``z**k``."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: Sequence[int] = ()) -> None:
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.field = field
        self.coeffs = tuple(c)

    @classmethod
    def const(cls, field: Field, c: int) -> "ZPoly":
        return cls(field, [c])

    @classmethod
    def z(cls, field: Field) -> "ZPoly":
        return cls(field, [0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ZPoly) and self.coeffs == other.coeffs and self.field == other.field

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "ZPoly(0)"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c:#x}" + ("" if k == 0 else "*z" if k == 1 else f"*z^{k}"))
        return "ZPoly(" + " + ".join(parts) + ")"

    def __add__(self, other: "ZPoly") -> "ZPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return ZPoly(self.field, [x ^ y for x, y in zip(a, b)])

    __sub__ = __add__

    def __neg__(self) -> "ZPoly":
        return self

    def __mul__(self, other: "ZPoly | int") -> "ZPoly":
        f = self.field
        if isinstance(other, int):
            return ZPoly(f, [f.mul(c, other) for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return ZPoly(f)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] ^= f.mul(a, b)
        return ZPoly(f, out)

    __rmul__ = __mul__

    def __call__(self, x: int) -> int:
        r = 0
        for c in reversed(self.coeffs):
            r = self.field.mul(r, x) ^ c
        return r


def lift(poly: ZPoly, field: Field, embed) -> ZPoly:
    """Map coefficients into ``field`` through the embedding ``embed``."""
    return ZPoly(field, [embed(c) for c in poly.coeffs])


def canonical_ABC(f: Field, n: int) -> tuple[Matrix, Matrix, Matrix]:
    """``A = I_n``, ``B`` = right n columns and ``C`` = left n columns of ``I_{n+1}``."""
    if n < 1:
        raise PrecodingError("n must be >= 1")
    eye = linalg.identity(n + 1)
    return linalg.identity(n), linalg.columns(eye, range(1, n + 1)), linalg.columns(eye, range(n))


def poly_det(M: Sequence[Sequence[ZPoly]]) -> ZPoly:
    """Determinant by cofactor expansion along the first row (characteristic 2)."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise PrecodingError("poly_det needs a square matrix")
    if n == 0:
        raise PrecodingError("empty matrix")
    if n == 1:
        return M[0][0]
    f = M[0][0].field
    total = ZPoly(f)
    for j, entry in enumerate(M[0]):
        if not entry:
            continue
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        # char 2: cofactor signs are all +1
        total = total + entry * poly_det(minor)
    return total


def pencil(f: Field, A: Matrix, B: Matrix, C: Matrix) -> list[list[ZPoly]]:
    """The ``(n+1) x n`` polynomial matrix ``zC - BA``."""
    BA = linalg.matmul(f, B, A)
    return [
        [ZPoly(f, [ba, c]) for ba, c in zip(row_ba, row_c)]
        for row_ba, row_c in zip(BA, C)
    ]


def kernel_product(f: Field, r: Sequence[ZPoly], P: Sequence[Sequence[ZPoly]]) -> list[ZPoly]:
    """Row vector times polynomial matrix."""
    cols = len(P[0])
    out = []
    for j in range(cols):
        acc = ZPoly(f)
        for ri, row in zip(r, P):
            acc = acc + ri * row[j]
        out.append(acc)
    return out


def _check_shapes(f: Field, A: Matrix, B: Matrix, C: Matrix, n: int) -> None:
    if linalg.shape(A) != (n, n):
        raise PrecodingError(f"A must be {n}x{n}")
    for name, M in (("B", B), ("C", C)):
        if linalg.shape(M) != (n + 1, n):
            raise PrecodingError(f"{name} must be {n + 1}x{n}")
    for name, M in (("A", A), ("B", B), ("C", C)):
        if linalg.rank(f, M) != n:
            raise PrecodingError(f"rank({name}) != {n}")


def solve_alignment_kernel(f: Field, A: Matrix, B: Matrix, C: Matrix, n: int) -> list[ZPoly]:
    """Nonzero polynomial ``r(z)`` with ``r(z) (zC - BA) = 0``.

    Picks the first (lexicographic) set of ``n`` rows with a nonzero
    polynomial determinant; the remaining row ``b`` gets ``-det E`` and row
    ``k`` of the chosen set gets the determinant with its row replaced by
    ``b``.
    """
    _check_shapes(f, A, B, C, n)
    P = pencil(f, A, B, C)
    for rows in combinations(range(n + 1), n):
        E = [P[k] for k in rows]
        d = poly_det(E)
        if d:
            break
    else:  # pragma: no cover - excluded by the rank check
        raise PrecodingError("zC - BA has no invertible n x n submatrix")
    (rest,) = set(range(n + 1)) - set(rows)
    b = P[rest]
    r = [ZPoly(f)] * (n + 1)
    for pos, k in enumerate(rows):
        Ek = [list(row) for row in E]
        Ek[pos] = list(b)
        r[k] = poly_det(Ek)
    r[rest] = -d
    if any(kernel_product(f, r, P)):
        raise AssertionError("kernel verification failed")  # pragma: no cover
    return r


def build_V1_star(f: Field, eta_values: Sequence[int], n: int) -> Matrix:
    """Rows ``(1, e, e^2, ..., e^n)``: the columns ``w, Tw, ..., T^n w``."""
    if len(eta_values) != 2 * n + 1:
        raise PrecodingError(f"need {2 * n + 1} eta values, got {len(eta_values)}")
    return [[f.pow(e, j) for j in range(n + 1)] for e in eta_values]


def build_V1_from_kernel(f: Field, r: Sequence[ZPoly], eta_values: Sequence[int]) -> Matrix:
    n = len(r) - 1
    if len(eta_values) != 2 * n + 1:
        raise PrecodingError(f"need {2 * n + 1} eta values, got {len(eta_values)}")
    return [[ri(e) for ri in r] for e in eta_values]


def alignment_residual(f: Field, eta_values: Sequence[int], V1: Matrix, A: Matrix, B: Matrix, C: Matrix) -> Matrix:
    """``diag(eta) V1 C + V1 B A``; all zeros iff the alignment identity holds."""
    lhs = linalg.diag_mul(f, eta_values, linalg.matmul(f, V1, C))
    rhs = linalg.matmul(f, V1, linalg.matmul(f, B, A))
    return linalg.add(lhs, rhs)


@dataclass(frozen=True)
class PrecodingSet:
    """Alignment solution ``(V1, A, B, C)`` for the given slot eta values."""

    n: int
    V1: Matrix
    A: Matrix
    B: Matrix
    C: Matrix
    eta_values: tuple[int, ...]

    def aligned(self, f: Field) -> bool:
        res = alignment_residual(f, self.eta_values, self.V1, self.A, self.B, self.C)
        return not any(any(row) for row in res)

    def check(self, f: Field) -> None:
        n = self.n
        if linalg.rank(f, self.A) != n or linalg.rank(f, self.B) != n or linalg.rank(f, self.C) != n:
            raise PrecodingError("A, B, C must all have rank n")
        if not self.aligned(f):
            raise PrecodingError("alignment identity diag(eta) V1 C = V1 B A fails")


def canonical_precoding(f: Field, eta_values: Sequence[int], n: int) -> PrecodingSet:
    A, B, C = canonical_ABC(f, n)
    ps = PrecodingSet(n, build_V1_star(f, eta_values, n), A, B, C, tuple(eta_values))
    ps.check(f)
    return ps
