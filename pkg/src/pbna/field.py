"""Arithmetic in GF(2^m).

Elements are plain ``int`` values whose binary digits are the coefficients
of a polynomial over GF(2), reduced modulo an irreducible polynomial of
degree ``m``.  Addition is XOR.

When no modulus is given, the lexicographically least irreducible
polynomial of degree ``m`` is used, so results are reproducible bit for
bit.  A few of them::

    m=2  : z^2 + z + 1                 0x7
    m=3  : z^3 + z + 1                 0xb
    m=4  : z^4 + z + 1                 0x13
    m=8  : z^8 + z^4 + z^3 + z + 1     0x11b
    m=16 : z^16 + z^5 + z^3 + z + 1    0x1002b
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MIN_M = 2
MAX_M = 32
# Log/exp tables are built only up to this size.
_TABLE_MAX_M = 16


class FieldError(ValueError):
    """Invalid field construction or illegal field operation."""


def _degree(p: int) -> int:
    return p.bit_length() - 1


def _poly_mod(a: int, b: int) -> int:
    db = _degree(b)
    while a and _degree(a) >= db:
        a ^= b << (_degree(a) - db)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division against every GF(2) polynomial of degree <= deg/2."""
    m = _degree(poly)
    if m < 1:
        return False
    if m == 1:
        return True
    if not poly & 1:
        return False
    for d in range(2, 1 << (m // 2 + 1)):
        if _poly_mod(poly, d) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def default_modulus(m: int) -> int:
    """Lexicographically least irreducible polynomial of degree ``m``."""
    for cand in range((1 << m) | 1, 1 << (m + 1), 2):
        if is_irreducible(cand):
            return cand
    raise FieldError(f"no irreducible polynomial of degree {m}")  # pragma: no cover


class Field:
    """GF(2^m) arithmetic context.

    Parameters
    ----------
    m : int
        Extension degree, ``2 <= m <= 32``.
    modulus : int, optional
        Reduction polynomial as a bit mask of degree ``m``.
    """

    def __init__(self, m: int, modulus: int | None = None) -> None:
        if not isinstance(m, (int, np.integer)) or not MIN_M <= m <= MAX_M:
            raise FieldError(f"m must be an integer in [{MIN_M}, {MAX_M}], got {m!r}")
        m = int(m)
        if modulus is None:
            modulus = default_modulus(m)
        elif _degree(modulus) != m:
            raise FieldError(f"modulus {modulus:#x} does not have degree {m}")
        elif not is_irreducible(modulus):
            raise FieldError(f"modulus {modulus:#x} is reducible over GF(2)")
        self.m = m
        self.modulus = int(modulus)
        self.order = 1 << m
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        if m <= _TABLE_MAX_M:
            self._build_tables()

    def __repr__(self) -> str:
        return f"Field(m={self.m}, modulus={self.modulus:#x})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and (self.m, self.modulus) == (other.m, other.modulus)

    def __hash__(self) -> int:
        return hash((self.m, self.modulus))

    # tables -------------------------------------------------------------

    def _build_tables(self) -> None:
        # The least irreducible modulus is not always primitive, so search a generator.
        q1 = self.order - 1
        for g in range(2, self.order):
            exp = [0] * (2 * q1)
            log = [0] * self.order
            x = 1
            ok = True
            for k in range(q1):
                if k and x == 1:
                    ok = False
                    break
                exp[k] = x
                log[x] = k
                x = self._mul_slow(x, g)
            if ok and x == 1:
                exp[q1:] = exp[:q1]
                self._exp, self._log = exp, log
                return
        raise FieldError("no multiplicative generator found")  # pragma: no cover

    def _mul_slow(self, a: int, b: int) -> int:
        r = 0
        top = self.order
        mod = self.modulus
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a & top:
                a ^= mod
        return r

    # arithmetic ---------------------------------------------------------

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise FieldError(f"{a!r} is not an element of GF(2^{self.m})")
        return a

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            return self._exp[self._log[a] + self._log[b]]
        return self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(2^m)")
        if self._log is not None:
            return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            return self.pow(self.inv(a), -k)
        r = 1
        while k:
            if k & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            k >>= 1
        return r

    def sum(self, values: Iterable[int]) -> int:
        r = 0
        for v in values:
            r ^= v
        return r

    def prod(self, values: Iterable[int]) -> int:
        r = 1
        for v in values:
            r = self.mul(r, v)
            if r == 0:
                return 0
        return r

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        r = 0
        for a, b in zip(u, v):
            if a and b:
                r ^= self.mul(a, b)
        return r

    # sampling and formatting -------------------------------------------

    def random_element(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, self.order))

    def random_elements(self, rng: np.random.Generator, size: int) -> list[int]:
        return [int(v) for v in rng.integers(0, self.order, size=size)]

    def random_nonzero(self, rng: np.random.Generator) -> int:
        return int(rng.integers(1, self.order))

    def to_hex(self, a: int) -> str:
        width = (self.m + 3) // 4
        return f"{a:0{width}x}"

    def from_hex(self, s: str) -> int:
        return self.check(int(s, 16))


@lru_cache(maxsize=None)
def make_field(m: int, modulus: int | None = None) -> Field:
    """Return a (cached) ``Field`` for GF(2^m)."""
    return Field(m, modulus)


def gf_mul(f: Field, a: int, b: int) -> int:
    return f.mul(a, b)


def gf_inv(f: Field, a: int) -> int:
    return f.inv(a)
