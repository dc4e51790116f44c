"""Coding vectors, transfer matrices and ratio functions evaluated at a point."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .field import Field
from .netgraph import SESSIONS, ExtendedNetwork, sigma, tau


class ResamplePoint(ArithmeticError):
    """A ratio denominator vanished at the sampled point; draw a new point."""


@dataclass(frozen=True)
class CodingVector:
    """One coefficient per adjacent edge pair, indexed like ``xnet.pairs``."""

    values: tuple[int, ...]
    field: Field

    def as_dict(self, xnet: ExtendedNetwork) -> dict[str, str]:
        """Hex-encoded coefficients keyed ``"up>down"``; used as witness points."""
        return {
            f"{up}>{down}": self.field.to_hex(v) for (up, down), v in zip(xnet.pairs, self.values)
        }

    @classmethod
    def from_dict(cls, xnet: ExtendedNetwork, f: Field, d: dict[str, str]) -> "CodingVector":
        return cls(tuple(f.from_hex(d[f"{up}>{down}"]) for up, down in xnet.pairs), f)


def sample_coding_vector(xnet: ExtendedNetwork, f: Field, rng: np.random.Generator) -> CodingVector:
    """Independent uniform coefficients from the whole field (zero included)."""
    return CodingVector(tuple(f.random_elements(rng, len(xnet.pairs))), f)


@dataclass(frozen=True)
class TransferMatrix:
    """``m[i-1][j-1]`` is the transfer value from source j to receiver i."""

    m: tuple[tuple[int, int, int], ...]

    def __call__(self, i: int, j: int) -> int:
        return self.m[i - 1][j - 1]


def propagate(xnet: ExtendedNetwork, f: Field, values) -> dict[str, list[int]]:
    """Per-edge global coding vectors (length 3) in topological order."""
    coef: dict[str, list[int]] = {}
    for k, j in enumerate(SESSIONS):
        unit = [0, 0, 0]
        unit[k] = 1
        coef[sigma(j)] = unit
    for eid in xnet.edge_order:
        if eid in coef:
            continue
        c = [0, 0, 0]
        for up, k in xnet.upstream_pairs[eid]:
            x = values[k]
            if not x:
                continue
            cu = coef[up]
            for t in range(3):
                if cu[t]:
                    c[t] ^= f.mul(x, cu[t])
        coef[eid] = c
    return coef


def eval_transfer_matrix(xnet: ExtendedNetwork, cv: CodingVector) -> TransferMatrix:
    if len(cv.values) != len(xnet.pairs):
        raise ValueError("coding vector does not match the network")
    coef = propagate(xnet, cv.field, cv.values)
    return TransferMatrix(tuple(tuple(coef[tau(i)]) for i in SESSIONS))  # type: ignore[arg-type]


class RatioKind(Enum):
    """Ratio functions ``m_ab m_pq / (m_aq m_pb)``; ``eta`` is the triple ratio."""

    p1 = (3, 1, 1, 2)
    p2 = (3, 1, 2, 2)
    p3 = (1, 2, 3, 3)
    q1 = (1, 1, 2, 3)
    q2 = (1, 2, 2, 3)
    q3 = (3, 1, 2, 3)
    eta = None

    @property
    def quadruple(self) -> tuple[int, int, int, int]:
        if self.value is None:
            raise ValueError("eta has no quadruple form")
        return self.value

    def terms(self) -> tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]:
        """(numerator, denominator) as lists of ``(i, j)`` transfer indices."""
        if self is RatioKind.eta:
            return ((3, 1), (1, 2), (2, 3)), ((2, 1), (3, 2), (1, 3))
        a, b, p, q = self.value
        return ((a, b), (p, q)), ((a, q), (p, b))


P_RATIOS = {1: RatioKind.p1, 2: RatioKind.p2, 3: RatioKind.p3}
Q_RATIOS = {1: RatioKind.q1, 2: RatioKind.q2, 3: RatioKind.q3}


def ratio_parts(kind: RatioKind, tm: TransferMatrix, f: Field) -> tuple[int, int]:
    """Numerator and denominator values (no division)."""
    num, den = kind.terms()
    return f.prod(tm(i, j) for i, j in num), f.prod(tm(i, j) for i, j in den)


def eval_ratio(kind: RatioKind, tm: TransferMatrix, f: Field) -> int:
    num, den = ratio_parts(kind, tm, f)
    if den == 0:
        raise ResamplePoint(f"denominator of {kind.name} vanishes at this point")
    return f.div(num, den)
