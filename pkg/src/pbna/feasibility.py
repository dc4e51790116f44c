"""Feasibility decision for precoding-based network alignment.

The network is classified into a regime from reachability and the
constancy of ``eta``; the applicable conditions are then decided by
max-flow (disjoint path pairs), by randomized evaluation of the
cross-multiplied mixed conditions, or exactly by the oracle.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from . import __version__
from .field import Field, make_field
from .netgraph import SESSIONS, ExtendedNetwork, disjoint_pair, session_min_cut
from .oracle import DEFAULT_CAP, TRIPLE_FORMS, Oracle, OracleCap, OracleScaleExceeded
from .transfer import (
    P_RATIOS,
    Q_RATIOS,
    CodingVector,
    RatioKind,
    eval_transfer_matrix,
    ratio_parts,
    sample_coding_vector,
)

Regime = Literal["eta_constant", "general", "zero_interference", "degenerate"]
OracleMode = Literal["auto", "force", "off"]

SCHEMA_VERSION = 1
# The only zero pattern worked out in closed form: m23 empty, all else nonzero.
SUPPORTED_ZERO_PATTERN = ((2, 3),)
_ETA_TAG = 99


class ParameterError(ValueError):
    """Parameters outside the scope of the construction (e.g. n <= 1)."""


@dataclass(frozen=True, order=True)
class ConditionId:
    """Member ``(a, b)`` of the mixed inequality for session ``i``.

    ``m_ii != a * (first cross term) + b * (second cross term)``, with the
    cross terms in the order they appear for each session.  ``(1, 1)`` is
    the mixed condition; the other two reduce to a ratio being != 1.
    """

    session: int
    a: int
    b: int

    def __post_init__(self) -> None:
        if self.session not in SESSIONS:
            raise ValueError(f"session must be 1, 2 or 3, got {self.session}")
        if (self.a, self.b) not in ((0, 1), (1, 0), (1, 1)):
            raise ValueError(f"(a, b) must be (0,1), (1,0) or (1,1), got {(self.a, self.b)}")

    @property
    def mixed(self) -> bool:
        return self.a == 1 and self.b == 1

    @property
    def ratio(self) -> RatioKind:
        """Ratio whose non-identity the single condition asserts."""
        if self.mixed:
            raise ValueError("the mixed condition has no single-ratio form")
        i = self.session
        p_member = (0, 1) if i == 1 else (1, 0)
        return P_RATIOS[i] if (self.a, self.b) == p_member else Q_RATIOS[i]

    @property
    def label(self) -> str:
        i = self.session
        if self.mixed:
            return "p1!=eta/(1+eta)" if i == 1 else f"p{i}!=1+eta"
        return f"p{i}!=1" if self.ratio is P_RATIOS[i] else f"p{i}!=eta"

    def to_dict(self) -> dict:
        return {"session": self.session, "a": self.a, "b": self.b, "label": self.label}


ALL_CONDITIONS = tuple(
    ConditionId(i, a, b) for i in SESSIONS for a, b in ((0, 1), (1, 0), (1, 1))
)


def condition_by_label(label: str) -> ConditionId:
    for c in ALL_CONDITIONS:
        if c.label == label:
            return c
    raise KeyError(label)


@dataclass
class ConditionRecord:
    condition: ConditionId
    method: Literal["maxflow", "randomized", "oracle"]
    verdict: Literal["holds", "violated"]
    required: bool = True
    certificate: dict | None = None
    trials: int | None = None
    error_contribution: float = 0.0

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_dict(self) -> dict:
        return {
            "condition": self.condition.to_dict(),
            "method": self.method,
            "verdict": self.verdict,
            "required": self.required,
            "certificate": self.certificate,
            "trials": self.trials,
            "error_contribution": self.error_contribution,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConditionRecord":
        c = d["condition"]
        return cls(
            ConditionId(c["session"], c["a"], c["b"]),
            d["method"],
            d["verdict"],
            d["required"],
            d["certificate"],
            d["trials"],
            d["error_contribution"],
        )


@dataclass(frozen=True)
class FeasibilityParams:
    m: int = 16
    trials: int = 32
    seed: int = 0
    n: int = 2
    oracle: OracleMode = "auto"

    def __post_init__(self) -> None:
        if not 2 <= self.m <= 32:
            raise ParameterError(f"m must be in [2, 32], got {self.m}")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be an unsigned 64-bit integer")
        if self.oracle not in ("auto", "force", "off"):
            raise ParameterError(f"oracle mode must be auto, force or off, got {self.oracle!r}")


@dataclass
class FeasibilityReport:
    regime: Regime
    feasible: bool
    supported: bool
    conditions: list[ConditionRecord]
    params: FeasibilityParams
    error_bound: float
    per_trial_error: float
    max_distance: int
    max_in_degree: int
    eta_constancy: dict | None = None
    zero_pattern: list[list[int]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    explanation: str = ""
    tool_version: str = __version__

    def condition(self, label: str) -> ConditionRecord:
        for rec in self.conditions:
            if rec.condition.label == label:
                return rec
        raise KeyError(label)

    @property
    def violated(self) -> list[ConditionRecord]:
        return [r for r in self.conditions if not r.holds]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "feasibility",
            "tool_version": self.tool_version,
            "params": asdict(self.params),
            "regime": self.regime,
            "feasible": self.feasible,
            "supported": self.supported,
            "explanation": self.explanation,
            "zero_pattern": self.zero_pattern,
            "eta_constancy": self.eta_constancy,
            "conditions": [r.to_dict() for r in self.conditions],
            "error_bound": self.error_bound,
            "per_trial_error": self.per_trial_error,
            "max_distance": self.max_distance,
            "max_in_degree": self.max_in_degree,
            "warnings": self.warnings,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeasibilityReport":
        if d.get("schema_version") != SCHEMA_VERSION or d.get("kind") != "feasibility":
            raise ValueError("not a feasibility report of a supported schema version")
        return cls(
            regime=d["regime"],
            feasible=d["feasible"],
            supported=d["supported"],
            conditions=[ConditionRecord.from_dict(r) for r in d["conditions"]],
            params=FeasibilityParams(**d["params"]),
            error_bound=d["error_bound"],
            per_trial_error=d["per_trial_error"],
            max_distance=d["max_distance"],
            max_in_degree=d["max_in_degree"],
            eta_constancy=d["eta_constancy"],
            zero_pattern=d["zero_pattern"],
            warnings=d["warnings"],
            explanation=d["explanation"],
            tool_version=d["tool_version"],
        )


# ---------------------------------------------------------------------------


def trial_rng(seed: int, tag: int, trial: int) -> np.random.Generator:
    """Independent generator per (seed, check, trial)."""
    return np.random.default_rng([seed, tag, trial])


def _tag(cond: ConditionId) -> int:
    return 10 * cond.session + 2 * cond.a + cond.b


def per_trial_error(m: int, max_distance: int) -> float:
    """Probability a single random point is a false zero: 1 - (1 - 3/2^m)^L."""
    return 1.0 - (1.0 - 3.0 / 2.0**m) ** max_distance


def error_bound(m: int, max_distance: int, trials: int) -> float:
    return per_trial_error(m, max_distance) ** trials


def zero_pattern(xnet: ExtendedNetwork) -> list[tuple[int, int]]:
    """Off-diagonal (i, j) with no path from source j to sink i."""
    return [(i, j) for i in SESSIONS for j in SESSIONS if i != j and not xnet.reachability[(i, j)]]


def _eta_values(xnet: ExtendedNetwork, f: Field, values) -> tuple[int, int]:
    tm = eval_transfer_matrix(xnet, CodingVector(tuple(values), f))
    return ratio_parts(RatioKind.eta, tm, f)


def eta_constancy(
    xnet: ExtendedNetwork,
    f: Field,
    seed: int,
    trials: int,
    oracle: OracleMode = "auto",
    cap: OracleCap = DEFAULT_CAP,
) -> dict:
    """Decide whether eta is identically 1 (the only constant it can take).

    Uses the oracle when allowed and within cap; otherwise tests
    ``m31 m12 m23 == m21 m32 m13`` at ``trials`` random points.
    """
    if oracle != "off":
        try:
            return {"constant": Oracle(xnet, cap).eta_is_constant(), "method": "oracle", "trials": None}
        except OracleScaleExceeded:
            if oracle == "force":
                raise
    for t in range(trials):
        cv = sample_coding_vector(xnet, f, trial_rng(seed, _ETA_TAG, t))
        num, den = _eta_values(xnet, f, cv.values)
        if num != den:
            return {
                "constant": False,
                "method": "randomized",
                "trials": t + 1,
                "witness": {"trial": t, "point": cv.as_dict(xnet)},
            }
    return {"constant": True, "method": "randomized", "trials": trials}


def classify_regime(
    xnet: ExtendedNetwork,
    f: Field,
    seed: int = 0,
    trials: int = 32,
    oracle: OracleMode = "auto",
    cap: OracleCap = DEFAULT_CAP,
) -> Regime:
    regime, _ = _classify(xnet, f, seed, trials, oracle, cap)
    return regime


def _classify(xnet, f, seed, trials, oracle, cap) -> tuple[Regime, dict | None]:
    if any(not xnet.reachability[(i, i)] for i in SESSIONS):
        return "degenerate", None
    if zero_pattern(xnet):
        return "zero_interference", None
    eta = eta_constancy(xnet, f, seed, trials, oracle, cap)
    return ("eta_constant" if eta["constant"] else "general"), eta


def check_single_condition(xnet: ExtendedNetwork, cond: ConditionId) -> ConditionRecord:
    """Decide ``ratio != 1`` by searching for an edge-disjoint path pair."""
    if cond.mixed:
        raise ValueError("use check_mixed_condition for the (1, 1) member")
    pair = disjoint_pair(xnet, *cond.ratio.quadruple)
    if pair is None:
        return ConditionRecord(cond, "maxflow", "violated")
    return ConditionRecord(cond, "maxflow", "holds", certificate=pair.to_dict())


def mixed_form_value(xnet: ExtendedNetwork, f: Field, session: int, values) -> int:
    tm = eval_transfer_matrix(xnet, CodingVector(tuple(values), f))
    return f.sum(f.prod(tm(i, j) for i, j in term) for term in TRIPLE_FORMS[session])


def check_mixed_condition(
    xnet: ExtendedNetwork, f: Field, cond: ConditionId, trials: int, seed: int
) -> ConditionRecord:
    """Randomized test of the cross-multiplied mixed condition.

    ``holds`` is certified by the first point where the form is nonzero;
    ``violated`` after ``trials`` zero evaluations carries error at most
    ``per_trial_error ** trials``.
    """
    if not cond.mixed:
        raise ValueError("check_mixed_condition needs the (1, 1) member")
    for t in range(trials):
        cv = sample_coding_vector(xnet, f, trial_rng(seed, _tag(cond), t))
        v = mixed_form_value(xnet, f, cond.session, cv.values)
        if v:
            return ConditionRecord(
                cond,
                "randomized",
                "holds",
                certificate={"trial": t, "point": cv.as_dict(xnet), "value": f.to_hex(v)},
                trials=t + 1,
            )
    return ConditionRecord(
        cond,
        "randomized",
        "violated",
        trials=trials,
        error_contribution=error_bound(f.m, xnet.max_distance, trials),
    )


def oracle_condition(oracle: Oracle, cond: ConditionId) -> ConditionRecord:
    if cond.mixed:
        form = oracle.triple_form(cond.session)
        ok = bool(form)
        cert = {"terms": len(form)}
    else:
        lhs, rhs = oracle.cross_products(*cond.ratio.quadruple)
        ok = lhs != rhs
        cert = {"lhs_terms": len(lhs), "rhs_terms": len(rhs)}
    return ConditionRecord(cond, "oracle", "holds" if ok else "violated", certificate=cert)


def _decide(xnet, f, cond, params: FeasibilityParams, oracle: Oracle | None, required: bool) -> ConditionRecord:
    if params.oracle == "force":
        assert oracle is not None
        rec = oracle_condition(oracle, cond)
    elif not cond.mixed:
        rec = check_single_condition(xnet, cond)
    else:
        rec = check_mixed_condition(xnet, f, cond, params.trials, params.seed)
        if not rec.holds and oracle is not None:
            rec = oracle_condition(oracle, cond)
    rec.required = required
    return rec


def check_feasibility(
    xnet: ExtendedNetwork, params: FeasibilityParams, cap: OracleCap = DEFAULT_CAP
) -> FeasibilityReport:
    f = make_field(params.m)
    oracle: Oracle | None = None
    if params.oracle != "off":
        try:
            oracle = Oracle(xnet, cap)
        except OracleScaleExceeded:
            if params.oracle == "force":
                raise
    warnings = [
        f"session {i} has min-cut {c} > 1; unit min-cut is assumed by the theory"
        for i in SESSIONS
        if (c := session_min_cut(xnet, i)) > 1
    ]
    regime, eta = _classify(xnet, f, params.seed, params.trials, params.oracle, cap)
    delta = per_trial_error(params.m, xnet.max_distance)
    report = FeasibilityReport(
        regime=regime,
        feasible=False,
        supported=True,
        conditions=[],
        params=params,
        error_bound=0.0,
        per_trial_error=delta,
        max_distance=xnet.max_distance,
        max_in_degree=xnet.max_in_degree,
        eta_constancy=eta,
        warnings=warnings,
    )

    if regime == "degenerate":
        dead = [i for i in SESSIONS if not xnet.reachability[(i, i)]]
        report.explanation = (
            f"session(s) {dead} cannot reach their own receiver; no rate is achievable"
        )
        return report

    if regime == "zero_interference":
        pattern = zero_pattern(xnet)
        report.zero_pattern = [list(p) for p in pattern]
        if tuple(pattern) != SUPPORTED_ZERO_PATTERN:
            report.supported = False
            if len(pattern) == 6:
                report.explanation = (
                    "no interference reaches any receiver (all off-diagonal transfer "
                    "functions are zero); plain routing applies, alignment is not needed"
                )
            else:
                report.explanation = (
                    "unsupported zero pattern: transfer functions "
                    + ", ".join(f"m{i}{j}" for i, j in pattern)
                    + " are zero; only the pattern with m23 = 0 alone is decided"
                )
            return report
        for i in SESSIONS:
            cond = ConditionId(i, *((0, 1) if i == 1 else (1, 0)))
            report.conditions.append(_decide(xnet, f, cond, params, oracle, True))
        report.feasible = all(r.holds for r in report.conditions)
        report.explanation = (
            "m23 = 0 removes one alignment constraint; feasible iff every p_i is non-constant"
        )
        _finish(report)
        return report

    if regime == "general" and params.n <= 1:
        raise ParameterError("n must be > 1 when eta is not constant")

    for cond in ALL_CONDITIONS:
        if regime == "general":
            required = True
        else:
            # eta == 1: non-constancy of p_i is all that matters; the mixed
            # forms are reported for information only.
            required = not cond.mixed
        report.conditions.append(_decide(xnet, f, cond, params, oracle, required))
    report.feasible = all(r.holds for r in report.conditions if r.required)
    if regime == "eta_constant":
        report.explanation = (
            "eta is identically 1; the two-slot scheme achieves (1/2, 1/2, 1/2) "
            "iff every p_i is non-constant"
        )
    else:
        report.explanation = "eta is not constant; all nine conditions are required"
    _finish(report)
    return report


def _finish(report: FeasibilityReport) -> None:
    eta = report.eta_constancy or {}
    if eta.get("method") == "randomized" or any(
        r.method == "randomized" for r in report.conditions
    ):
        report.error_bound = report.per_trial_error ** report.params.trials
