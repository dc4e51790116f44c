"""Exact transfer polynomials by path enumeration.

Every transfer polynomial is a sum of path monomials with coefficient 1,
and all identities checked here are over characteristic 2, so a
polynomial is just the set of its monomials and addition is symmetric
difference.  A monomial is a sorted tuple of variable (pair) indices with
repetition, so ``(3, 5, 5)`` is ``x3 * x5**2``.

This is the brute-force ground truth used to validate the randomized and
max-flow decisions on small graphs.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from heapq import merge
from typing import Iterable, Sequence

from .field import Field
from .netgraph import SESSIONS, ExtendedNetwork, ZeroTransferError, sigma, tau

Monomial = tuple[int, ...]


class OracleScaleExceeded(RuntimeError):
    """The instance is too large for exact enumeration."""


@dataclass(frozen=True)
class OracleCap:
    max_edges: int = 24
    max_paths: int = 20_000
    max_pairs: int = 20_000


DEFAULT_CAP = OracleCap()


def exponents(mono: Monomial) -> dict[int, int]:
    return dict(Counter(mono))


class SparsePoly:
    """Polynomial over GF(2) in the coding variables."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Monomial] = ()) -> None:
        acc: set[Monomial] = set()
        for t in terms:
            acc ^= {t}
        self.terms = frozenset(acc)

    @classmethod
    def _raw(cls, terms: frozenset[Monomial]) -> "SparsePoly":
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SparsePoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "SparsePoly(0)"
        return "SparsePoly(" + " + ".join(_fmt(t) for t in sorted(self.terms)) + ")"

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        return SparsePoly._raw(self.terms ^ other.terms)

    def mul(self, other: "SparsePoly", max_pairs: int | None = None) -> "SparsePoly":
        if max_pairs is not None and len(self.terms) * len(other.terms) > max_pairs:
            raise OracleScaleExceeded(
                f"product of {len(self.terms)} x {len(other.terms)} terms exceeds {max_pairs}"
            )
        acc: set[Monomial] = set()
        for s in self.terms:
            for t in other.terms:
                m = tuple(merge(s, t))
                if m in acc:
                    acc.remove(m)
                else:
                    acc.add(m)
        return SparsePoly._raw(frozenset(acc))

    __mul__ = mul

    def evaluate(self, f: Field, values: Sequence[int]) -> int:
        r = 0
        for t in self.terms:
            r ^= f.prod(values[v] for v in t)
        return r

    def square_coefficient(self, var: int) -> "SparsePoly":
        """Coefficient polynomial of ``var**2``."""
        out = set()
        for t in self.terms:
            c = t.count(var)
            if c == 2:
                out.add(tuple(v for v in t if v != var))
            elif c > 2:  # pragma: no cover - transfer products never exceed degree 2
                raise ValueError("unexpected exponent > 2")
        return SparsePoly._raw(frozenset(out))

    def variables(self) -> set[int]:
        return {v for t in self.terms for v in t}


def _fmt(t: Monomial) -> str:
    if not t:
        return "1"
    return "*".join(f"x{v}" + (f"^{e}" if e > 1 else "") for v, e in sorted(Counter(t).items()))


def enum_paths(xnet: ExtendedNetwork, j: int, i: int, cap: int = DEFAULT_CAP.max_paths) -> list[Monomial]:
    """One monomial per path from ``sigma_j`` to ``tau_i``."""
    target = tau(i)
    out: list[Monomial] = []
    stack: list[tuple[str, tuple[int, ...]]] = [(sigma(j), ())]
    down = xnet.out_edges
    idx = xnet.pair_index
    while stack:
        e, mono = stack.pop()
        if e == target:
            out.append(tuple(sorted(mono)))
            if len(out) > cap:
                raise OracleScaleExceeded(f"more than {cap} paths from s'{j} to d'{i}")
            continue
        for nxt in down.get(xnet.edges[e].head, ()):
            stack.append((nxt, mono + (idx[(e, nxt)],)))
    return out


class Oracle:
    """Transfer polynomials of one extended network, computed lazily and cached."""

    def __init__(self, xnet: ExtendedNetwork, cap: OracleCap = DEFAULT_CAP) -> None:
        n_edges = len(xnet.base.edges)
        if n_edges > cap.max_edges:
            raise OracleScaleExceeded(
                f"{n_edges} edges exceeds the oracle limit of {cap.max_edges}; use randomized mode"
            )
        self.xnet = xnet
        self.cap = cap
        self._polys: dict[tuple[int, int], SparsePoly] = {}

    def paths(self, i: int, j: int) -> list[Monomial]:
        return enum_paths(self.xnet, j, i, self.cap.max_paths)

    def m(self, i: int, j: int) -> SparsePoly:
        key = (i, j)
        if key not in self._polys:
            self._polys[key] = SparsePoly(self.paths(i, j))
        return self._polys[key]

    @cached_property
    def all_polys(self) -> dict[tuple[int, int], SparsePoly]:
        return {(i, j): self.m(i, j) for i in SESSIONS for j in SESSIONS}

    def product(self, *pairs: tuple[int, int]) -> SparsePoly:
        acc = SparsePoly([()])
        for i, j in pairs:
            acc = acc.mul(self.m(i, j), self.cap.max_pairs)
        return acc

    def cross_products(self, a: int, b: int, p: int, q: int) -> tuple[SparsePoly, SparsePoly]:
        if a == p or b == q:
            raise ValueError(f"invalid quadruple ({a},{b},{p},{q}): need a != p and b != q")
        return self.product((a, b), (p, q)), self.product((a, q), (p, b))

    def product_identity_holds(self, a: int, b: int, p: int, q: int) -> bool:
        lhs, rhs = self.cross_products(a, b, p, q)
        return lhs == rhs

    def square_term_equal(self, a: int, b: int, p: int, q: int, var: int) -> bool:
        lhs, rhs = self.cross_products(a, b, p, q)
        return lhs.square_coefficient(var) == rhs.square_coefficient(var)

    def triple_form(self, i: int) -> SparsePoly:
        """Cross-multiplied mixed condition for session ``i``; zero means violated."""
        terms = TRIPLE_FORMS[i]
        needed = {ij for term in terms for ij in term}
        for ij in sorted(needed):
            if not self.m(*ij):
                raise ZeroTransferError(f"m_{ij[0]}{ij[1]} is identically zero")
        acc = SparsePoly()
        for term in terms:
            acc = acc + self.product(*term)
        return acc

    def triple_identity_zero(self, i: int) -> bool:
        return not self.triple_form(i)

    def eta_numerator_denominator(self) -> tuple[SparsePoly, SparsePoly]:
        return self.product((3, 1), (1, 2), (2, 3)), self.product((2, 1), (3, 2), (1, 3))

    def eta_is_constant(self) -> bool:
        num, den = self.eta_numerator_denominator()
        return num == den


# m11 m23 m32 + m21 m13 m32 + m31 m12 m23 and its analogues for sessions 2, 3
TRIPLE_FORMS: dict[int, tuple[tuple[tuple[int, int], ...], ...]] = {
    1: (((1, 1), (2, 3), (3, 2)), ((2, 1), (1, 3), (3, 2)), ((3, 1), (1, 2), (2, 3))),
    2: (((2, 2), (3, 1), (1, 3)), ((3, 2), (2, 1), (1, 3)), ((1, 2), (2, 3), (3, 1))),
    3: (((3, 3), (1, 2), (2, 1)), ((1, 3), (3, 2), (2, 1)), ((2, 3), (3, 1), (1, 2))),
}


def transfer_poly(xnet: ExtendedNetwork, i: int, j: int, cap: int = DEFAULT_CAP.max_paths) -> SparsePoly:
    return SparsePoly(enum_paths(xnet, j, i, cap))


def product_identity_holds(
    xnet: ExtendedNetwork, a: int, b: int, p: int, q: int, cap: OracleCap = DEFAULT_CAP
) -> bool:
    return Oracle(xnet, cap).product_identity_holds(a, b, p, q)


def square_term_equal(
    xnet: ExtendedNetwork, a: int, b: int, p: int, q: int, pair_var: int, cap: OracleCap = DEFAULT_CAP
) -> bool:
    return Oracle(xnet, cap).square_term_equal(a, b, p, q, pair_var)


def triple_identity_zero(xnet: ExtendedNetwork, i: int, cap: OracleCap = DEFAULT_CAP) -> bool:
    return Oracle(xnet, cap).triple_identity_zero(i)


VALID_QUADRUPLES = tuple(
    (a, b, p, q) for a in SESSIONS for b in SESSIONS for p in SESSIONS for q in SESSIONS
    if a != p and b != q
)


def square_term_sweep(oracle: Oracle) -> dict:
    """Check the square-term equality for every variable and valid quadruple."""
    n_vars = len(oracle.xnet.pairs)
    failures = []
    checked = 0
    for quad in VALID_QUADRUPLES:
        lhs, rhs = oracle.cross_products(*quad)
        for var in range(n_vars):
            checked += 1
            if lhs.square_coefficient(var) != rhs.square_coefficient(var):
                up, down = oracle.xnet.pairs[var]
                failures.append({"quadruple": list(quad), "variable": f"{up}>{down}"})
    return {"checked": checked, "all_equal": not failures, "failures": failures}
