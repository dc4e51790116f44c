"""End-to-end alignment over L network uses: encode, propagate, decode.

Three schemes are supported, chosen from the feasibility report:

``general``
    eta is not constant.  ``L = 2n + 1`` uses, ``V1`` from the canonical
    Vandermonde construction on the per-slot eta values, ``V3`` and ``V2``
    solved from the alignment equations at receivers 2 and 1.
``two_slot``
    eta is identically 1.  ``L = 2`` uses, ``V1 = (theta1, theta2)^T`` and
    ``A = B = C = 1``.
``free_v1``
    The interference term ``m23`` is zero, which removes the alignment
    constraint at receiver 2, so ``V1`` is a random matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

from . import __version__, linalg
from .feasibility import (
    SCHEMA_VERSION,
    FeasibilityParams,
    FeasibilityReport,
    ParameterError,
    check_feasibility,
    trial_rng,
)
from .field import Field, make_field
from .linalg import DecodeFailure, Matrix, rank_and_solve
from .netgraph import SESSIONS, ExtendedNetwork
from .precode import PrecodingSet, canonical_ABC, canonical_precoding
from .transfer import (
    P_RATIOS,
    CodingVector,
    RatioKind,
    TransferMatrix,
    eval_ratio,
    eval_transfer_matrix,
    sample_coding_vector,
)

Scheme = Literal["general", "two_slot", "free_v1"]

_SLOT_TAG = 1000
_SOURCE_TAG = 2000
_THETA_TAG = 3000


class SimulationError(RuntimeError):
    """The run could not be set up (resampling budget exhausted)."""


class InfeasibleError(RuntimeError):
    """Refused: the feasibility report says alignment cannot succeed."""

    def __init__(self, report: FeasibilityReport, message: str) -> None:
        super().__init__(message)
        self.report = report


class UnsupportedRegime(RuntimeError):
    """No simulation scheme exists for this regime or zero pattern."""


@dataclass(frozen=True)
class SimParams:
    n: int = 2
    m: int = 16
    seed: int = 0
    max_resamples: int = 64
    trials: int = 32
    force: bool = False
    oracle: Literal["auto", "force", "off"] = "auto"

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if self.max_resamples < 1:
            raise ParameterError("max_resamples must be >= 1")

    @property
    def L1(self) -> int:
        return self.n + 1

    @property
    def L2(self) -> int:
        return self.n

    @property
    def L(self) -> int:
        return self.L1 + self.L2

    def feasibility_params(self) -> FeasibilityParams:
        return FeasibilityParams(m=self.m, trials=self.trials, seed=self.seed, n=self.n, oracle=self.oracle)


@dataclass
class AlignmentScheme:
    """Everything fixed before any data is sent: slots, precoders, diagonals."""

    scheme: Scheme
    field: Field
    n: int
    L1: int
    L2: int
    slots: list[CodingVector]
    transfer: list[TransferMatrix]
    gamma: PrecodingSet
    V2: Matrix
    V3: Matrix
    resamples: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def L(self) -> int:
        return self.L1 + self.L2

    @property
    def V1(self) -> Matrix:
        return self.gamma.V1

    def M(self, i: int, j: int) -> list[int]:
        """Diagonal of M_ij across slots."""
        return [tm(i, j) for tm in self.transfer]

    def V(self, j: int) -> Matrix:
        return (self.V1, self.V2, self.V3)[j - 1]

    def MV(self, i: int, j: int) -> Matrix:
        return linalg.diag_mul(self.field, self.M(i, j), self.V(j))

    def alignment(self) -> dict[str, bool]:
        f = self.field
        g = self.gamma
        out = {
            "A1": self.MV(1, 2) == linalg.matmul(f, self.MV(1, 3), g.A),
            "A3": self.MV(3, 2) == linalg.matmul(f, self.MV(3, 1), g.C),
        }
        if self.scheme != "free_v1":
            out["A2"] = self.MV(2, 3) == linalg.matmul(f, self.MV(2, 1), g.B)
        return dict(sorted(out.items()))

    def decode_matrix(self, i: int) -> Matrix:
        """[M_i1 V1 | M_ij V_j] where j is the session whose columns stay separate."""
        other = {1: 2, 2: 2, 3: 3}[i]
        return linalg.hstack(self.MV(i, 1), self.MV(i, other))

    def psi_checks(self) -> list[dict]:
        out = []
        for i in SESSIONS:
            rk = linalg.rank(self.field, self.decode_matrix(i))
            out.append({"session": i, "rank": rk, "full_rank": rk == self.L})
        return out

    def encode(self, X: dict[int, list[int]]) -> dict[int, list[int]]:
        """Received vectors ``Z_i = sum_j M_ij V_j X_j``."""
        f = self.field
        Z = {}
        for i in SESSIONS:
            acc = [0] * self.L
            for j in SESSIONS:
                contrib = linalg.matvec(f, self.MV(i, j), X[j])
                acc = [a ^ b for a, b in zip(acc, contrib)]
            Z[i] = acc
        return Z

    def decode(self, Z: dict[int, list[int]]) -> dict[int, list[int] | None]:
        """Solve each receiver's folded system; ``None`` when it is singular."""
        out: dict[int, list[int] | None] = {}
        for i in SESSIONS:
            try:
                _, y = rank_and_solve(self.field, self.decode_matrix(i), Z[i])
            except DecodeFailure:
                out[i] = None
                continue
            assert y is not None
            out[i] = y[: self.L1] if i == 1 else y[self.L1 :]
        return out


@dataclass
class SimResult:
    scheme: Scheme
    params: SimParams
    n: int
    L: int
    L1: int
    L2: int
    slots: list[dict[str, str]]
    transfer: list[list[list[str]]]
    eta_values: list[str]
    gamma: dict[str, list[list[str]]]
    V2: list[list[str]]
    V3: list[list[str]]
    alignment: dict[str, bool]
    psi_checks: list[dict]
    X: dict[str, list[str]]
    Z: dict[str, list[str]]
    X_hat: dict[str, list[str] | None]
    rates: tuple[Fraction, Fraction, Fraction]
    success: bool
    resamples: int
    warnings: list[str]
    feasible: bool
    regime: str
    tool_version: str = __version__

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "simulation",
            "tool_version": self.tool_version,
            "params": {
                "n": self.params.n,
                "m": self.params.m,
                "seed": self.params.seed,
                "max_resamples": self.params.max_resamples,
                "trials": self.params.trials,
                "force": self.params.force,
                "oracle": self.params.oracle,
            },
            "regime": self.regime,
            "feasible": self.feasible,
            "scheme": self.scheme,
            "n": self.n,
            "L": self.L,
            "L1": self.L1,
            "L2": self.L2,
            "slots": self.slots,
            "transfer": self.transfer,
            "eta_values": self.eta_values,
            "gamma": self.gamma,
            "V2": self.V2,
            "V3": self.V3,
            "alignment": self.alignment,
            "psi_checks": self.psi_checks,
            "X": self.X,
            "Z": self.Z,
            "X_hat": self.X_hat,
            "rates": [str(r) for r in self.rates],
            "success": self.success,
            "resamples": self.resamples,
            "warnings": self.warnings,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimResult":
        if d.get("schema_version") != SCHEMA_VERSION or d.get("kind") != "simulation":
            raise ValueError("not a simulation report of a supported schema version")
        keys = (
            "scheme n L L1 L2 slots transfer eta_values gamma V2 V3 alignment psi_checks "
            "X Z X_hat success resamples warnings feasible regime tool_version"
        ).split()
        return cls(
            params=SimParams(**d["params"]),
            rates=tuple(Fraction(r) for r in d["rates"]),  # type: ignore[arg-type]
            **{k: d[k] for k in keys},
        )


def rates(n: int, scheme: Scheme = "general") -> tuple[Fraction, Fraction, Fraction]:
    if scheme == "two_slot":
        half = Fraction(1, 2)
        return half, half, half
    L = 2 * n + 1
    return Fraction(n + 1, L), Fraction(n, L), Fraction(n, L)


def _all_nonzero(tm: TransferMatrix, skip: set[tuple[int, int]]) -> bool:
    return all(tm(i, j) for i in SESSIONS for j in SESSIONS if (i, j) not in skip)


def _sample_slots(
    xnet: ExtendedNetwork,
    f: Field,
    params: SimParams,
    count: int,
    skip: set[tuple[int, int]],
    distinct_eta: bool,
) -> tuple[list[CodingVector], list[TransferMatrix], list[int], int]:
    slots, tms, etas = [], [], []
    resamples = 0
    for k in range(count):
        failure = ""
        for attempt in range(params.max_resamples):
            cv = sample_coding_vector(xnet, f, trial_rng(params.seed, _SLOT_TAG + k, attempt))
            tm = eval_transfer_matrix(xnet, cv)
            if not _all_nonzero(tm, skip):
                failure = "a transfer function vanished at every sampled point"
                resamples += 1
                continue
            eta = eval_ratio(RatioKind.eta, tm, f) if not skip else 0
            if distinct_eta and eta in etas:
                failure = "eta values kept colliding with earlier slots"
                resamples += 1
                continue
            break
        else:
            raise SimulationError(
                f"slot {k + 1}: {failure} after {params.max_resamples} draws; "
                "suspicious for a feasible network: possible small-field coincidence, "
                "rerun with larger m"
            )
        slots.append(cv)
        tms.append(tm)
        etas.append(eta)
    return slots, tms, etas, resamples


def _inv_diag(f: Field, d: list[int]) -> list[int]:
    return [f.inv(x) for x in d]


def build_scheme(
    xnet: ExtendedNetwork, params: SimParams, scheme: Scheme, distinct_eta: bool = True
) -> AlignmentScheme:
    """Sample slots and construct (V1, A, B, C), V2, V3 for ``scheme``.

    ``distinct_eta=False`` only makes sense when forcing the general scheme
    onto a network whose eta is constant.
    """
    f = make_field(params.m)
    warnings: list[str] = []

    if scheme == "two_slot":
        slots, tms, etas, resamples = _sample_slots(xnet, f, params, 2, set(), False)
        for attempt in range(params.max_resamples):
            p_vals = [[eval_ratio(P_RATIOS[i], tm, f) for tm in tms] for i in SESSIONS]
            if all(p[0] != p[1] for p in p_vals):
                break
            resamples += 1
            # redraw the second slot until every p_i separates the two uses
            cv = sample_coding_vector(xnet, f, trial_rng(params.seed, _SLOT_TAG + 1, 10_000 + attempt))
            tm = eval_transfer_matrix(xnet, cv)
            if _all_nonzero(tm, set()):
                slots[1], tms[1] = cv, tm
        else:
            warnings.append("some p_i took equal values in both slots; decodability will fail")
        rng = trial_rng(params.seed, _THETA_TAG, 0)
        t1 = f.random_nonzero(rng)
        t2 = t1
        while t2 == t1:
            t2 = f.random_nonzero(rng)
        one = [[1]]
        etas = [eval_ratio(RatioKind.eta, tm, f) for tm in tms]
        gamma = PrecodingSet(1, [[t1], [t2]], one, one, one, tuple(etas))
        n, L1, L2 = 1, 1, 1
    elif scheme == "free_v1":
        n = params.n
        L1, L2 = n + 1, n
        slots, tms, etas, resamples = _sample_slots(xnet, f, params, L1 + L2, {(2, 3)}, False)
        rng = trial_rng(params.seed, _THETA_TAG, 0)
        V1 = [f.random_elements(rng, L1) for _ in range(L1 + L2)]
        A, B, C = canonical_ABC(f, n)
        gamma = PrecodingSet(n, V1, A, B, C, tuple(etas))
    else:
        n = params.n
        if n <= 1:
            raise ParameterError("n must be > 1 in the general regime")
        L1, L2 = n + 1, n
        slots, tms, etas, resamples = _sample_slots(xnet, f, params, L1 + L2, set(), distinct_eta)
        if len(set(etas)) < len(etas):
            warnings.append("eta values coincide across slots; V1 is rank deficient")
        gamma = canonical_precoding(f, etas, n)

    s = AlignmentScheme(scheme, f, n, L1, L2, slots, tms, gamma, [], [], resamples, warnings)
    if scheme == "free_v1":
        # receiver 3 fixes V2, receiver 1 then fixes V3
        V2 = linalg.diag_mul(f, _inv_diag(f, s.M(3, 2)), linalg.matmul(f, s.MV(3, 1), gamma.C))
        Ainv = linalg.inverse(f, gamma.A)
        s.V2 = V2
        s.V3 = linalg.diag_mul(f, _inv_diag(f, s.M(1, 3)), linalg.matmul(f, s.MV(1, 2), Ainv))
    else:
        s.V3 = linalg.diag_mul(f, _inv_diag(f, s.M(2, 3)), linalg.matmul(f, s.MV(2, 1), gamma.B))
        s.V2 = linalg.diag_mul(f, _inv_diag(f, s.M(1, 2)), linalg.matmul(f, s.MV(1, 3), gamma.A))
    if not all(s.alignment().values()):
        raise AssertionError("alignment identities fail after construction")
    return s


def choose_scheme(report: FeasibilityReport, force: bool) -> Scheme:
    if report.regime == "degenerate":
        raise UnsupportedRegime(report.explanation)
    if report.regime == "zero_interference":
        if not report.supported:
            raise UnsupportedRegime(report.explanation)
        return "free_v1"
    if report.regime == "eta_constant" and not (force and not report.feasible):
        return "two_slot"
    return "general"


def _hex_matrix(f: Field, M: Matrix) -> list[list[str]]:
    return [[f.to_hex(x) for x in row] for row in M]


def run_pbna(
    xnet: ExtendedNetwork, params: SimParams, report: FeasibilityReport | None = None
) -> SimResult:
    """Check feasibility (unless a report is supplied), then encode and decode once."""
    if report is None:
        report = check_feasibility(xnet, params.feasibility_params())
    if not report.feasible and not params.force:
        raise InfeasibleError(report, f"network is not alignment-feasible ({report.regime}); see the report")
    scheme = choose_scheme(report, params.force)
    s = build_scheme(xnet, params, scheme, distinct_eta=report.regime != "eta_constant")
    f = s.field

    rng = trial_rng(params.seed, _SOURCE_TAG, 0)
    X = {1: f.random_elements(rng, s.L1), 2: f.random_elements(rng, s.L2), 3: f.random_elements(rng, s.L2)}
    Z = s.encode(X)
    X_hat = s.decode(Z)
    psi = s.psi_checks()
    success = all(X_hat[i] == X[i] for i in SESSIONS)
    if all(p["full_rank"] for p in psi) and not success:
        raise AssertionError("full-rank receivers failed to recover the sources")

    return SimResult(
        scheme=scheme,
        params=params,
        n=s.n,
        L=s.L,
        L1=s.L1,
        L2=s.L2,
        slots=[cv.as_dict(xnet) for cv in s.slots],
        transfer=[[[f.to_hex(v) for v in row] for row in tm.m] for tm in s.transfer],
        eta_values=[f.to_hex(e) for e in s.gamma.eta_values],
        gamma={
            "V1": _hex_matrix(f, s.gamma.V1),
            "A": _hex_matrix(f, s.gamma.A),
            "B": _hex_matrix(f, s.gamma.B),
            "C": _hex_matrix(f, s.gamma.C),
        },
        V2=_hex_matrix(f, s.V2),
        V3=_hex_matrix(f, s.V3),
        alignment=s.alignment(),
        psi_checks=psi,
        X={str(i): [f.to_hex(v) for v in X[i]] for i in SESSIONS},
        Z={str(i): [f.to_hex(v) for v in Z[i]] for i in SESSIONS},
        X_hat={
            str(i): (None if X_hat[i] is None else [f.to_hex(v) for v in X_hat[i]]) for i in SESSIONS
        },
        rates=rates(s.n, scheme),
        success=success,
        resamples=s.resamples,
        warnings=s.warnings,
        feasible=report.feasible,
        regime=report.regime,
    )
