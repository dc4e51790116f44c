import numpy as np
import pytest

from netgen import make, random_network
from pbna.feasibility import (
    ALL_CONDITIONS,
    ConditionId,
    FeasibilityParams,
    FeasibilityReport,
    ParameterError,
    check_feasibility,
    check_mixed_condition,
    check_single_condition,
    classify_regime,
    condition_by_label,
    error_bound,
    per_trial_error,
)
from pbna.field import make_field
from pbna.netgraph import DisjointPair, extend, validate_disjoint_pair
from pbna.oracle import OracleCap, OracleScaleExceeded
from pbna.transfer import RatioKind

F16 = make_field(16)


def test_condition_labels_and_ratios():
    labels = [c.label for c in ALL_CONDITIONS]
    assert labels == [
        "p1!=1", "p1!=eta", "p1!=eta/(1+eta)",
        "p2!=eta", "p2!=1", "p2!=1+eta",
        "p3!=eta", "p3!=1", "p3!=1+eta",
    ]
    assert ConditionId(1, 0, 1).ratio is RatioKind.p1
    assert ConditionId(1, 1, 0).ratio is RatioKind.q1
    assert ConditionId(2, 1, 0).ratio is RatioKind.p2
    assert ConditionId(3, 0, 1).ratio is RatioKind.q3
    assert condition_by_label("p2!=1+eta") == ConditionId(2, 1, 1)
    with pytest.raises(ValueError):
        ConditionId(1, 0, 0)
    with pytest.raises(ValueError):
        ConditionId(4, 1, 1)
    with pytest.raises(ValueError):
        ConditionId(1, 1, 1).ratio


def test_error_bound_formula():
    assert per_trial_error(16, 6) == pytest.approx(1 - (1 - 3 / 65536) ** 6, rel=1e-12)
    assert error_bound(16, 6, 32) == pytest.approx((1 - (1 - 3 / 65536) ** 6) ** 32, rel=1e-9)
    assert error_bound(2, 0, 5) == 0.0


def test_params_validation():
    with pytest.raises(ParameterError):
        FeasibilityParams(m=1)
    with pytest.raises(ParameterError):
        FeasibilityParams(trials=0)
    with pytest.raises(ParameterError):
        FeasibilityParams(oracle="maybe")
    with pytest.raises(ParameterError):
        FeasibilityParams(seed=-1)


def test_regimes(two_relay, bottleneck, disjoint, diamond):
    assert classify_regime(two_relay, F16) == "general"
    assert classify_regime(bottleneck, F16) == "eta_constant"
    assert classify_regime(disjoint, F16) == "zero_interference"
    assert classify_regime(diamond, F16) == "zero_interference"
    # randomized eta test agrees with the oracle here
    assert classify_regime(bottleneck, F16, oracle="off") == "eta_constant"
    assert classify_regime(two_relay, F16, oracle="off") == "general"


def test_degenerate_regime():
    x = extend(make([(0, 1), (2, 3)], [(0, 1), (2, 3), (1, 0)]))
    assert classify_regime(x, F16) == "degenerate"
    report = check_feasibility(x, FeasibilityParams())
    assert not report.feasible and report.regime == "degenerate"
    assert "cannot reach" in report.explanation


def test_single_condition_two_relay(two_relay):
    rec = check_single_condition(two_relay, ConditionId(1, 0, 1))
    assert rec.holds and rec.method == "maxflow"
    cert = rec.certificate
    pair = DisjointPair(
        tuple(tuple(p) for p in cert["paths"]),
        tuple((d["sink"], d["source"]) for d in cert["pairing"]),
    )
    assert validate_disjoint_pair(two_relay, pair)
    assert check_single_condition(two_relay, ConditionId(2, 0, 1)).holds  # q2 != 1


def test_single_condition_bottleneck(bottleneck):
    rec = check_single_condition(bottleneck, ConditionId(1, 0, 1))
    assert not rec.holds and rec.certificate is None


def test_mixed_condition(two_relay, bottleneck):
    for xnet in (two_relay, bottleneck):
        rec = check_mixed_condition(xnet, F16, ConditionId(1, 1, 1), trials=16, seed=3)
        assert rec.holds and rec.trials <= 16
        assert rec.certificate["value"] != "0000"
    with pytest.raises(ValueError):
        check_mixed_condition(two_relay, F16, ConditionId(1, 0, 1), 4, 0)
    with pytest.raises(ValueError):
        check_single_condition(two_relay, ConditionId(1, 1, 1))


def test_two_relay_report(two_relay):
    r = check_feasibility(two_relay, FeasibilityParams(seed=42))
    assert r.feasible and r.regime == "general"
    assert len(r.conditions) == 9 and all(c.holds for c in r.conditions)
    assert r.max_distance == 6
    assert r.error_bound == pytest.approx(per_trial_error(16, 6) ** 32)
    assert r.error_bound <= 1e-3


def test_bottleneck_report(bottleneck):
    r = check_feasibility(bottleneck, FeasibilityParams(seed=1))
    assert not r.feasible and r.regime == "eta_constant"
    violated = {c.condition.label for c in r.violated}
    for i in (1, 2, 3):
        assert f"p{i}!=1" in violated and f"p{i}!=eta" in violated
    assert all(c.certificate is None for c in r.violated)
    assert not any(c.required for c in r.conditions if c.condition.mixed)


def test_disjoint_sessions_unsupported(disjoint):
    r = check_feasibility(disjoint, FeasibilityParams())
    assert not r.supported and not r.feasible
    assert len(r.zero_pattern) == 6
    assert "routing" in r.explanation


def test_diamond_zero_pattern(diamond):
    r = check_feasibility(diamond, FeasibilityParams(seed=5))
    assert r.supported and r.feasible
    assert r.zero_pattern == [[2, 3]]
    assert [c.condition.label for c in r.conditions] == ["p1!=1", "p2!=1", "p3!=1"]
    assert r.error_bound == 0.0


def test_other_zero_pattern_unsupported():
    # m21 = 0 only
    arcs = [(0, 3), (1, 4), (2, 5), (0, 5), (1, 3), (1, 5), (2, 3), (2, 4)]
    x = extend(make(arcs, [(0, 3), (1, 4), (2, 5)]))
    r = check_feasibility(x, FeasibilityParams())
    assert r.zero_pattern == [[2, 1]]
    assert not r.supported and "m21" in r.explanation


def test_n1_rejected_in_general_regime(two_relay, bottleneck):
    with pytest.raises(ParameterError):
        check_feasibility(two_relay, FeasibilityParams(n=1))
    check_feasibility(bottleneck, FeasibilityParams(n=1))


def test_deterministic_verdicts_independent_of_seed(two_relay, bottleneck):
    for xnet in (two_relay, bottleneck):
        a = check_feasibility(xnet, FeasibilityParams(seed=1, trials=4))
        b = check_feasibility(xnet, FeasibilityParams(seed=99, trials=40))
        for ra, rb in zip(a.conditions, b.conditions):
            if ra.method == "maxflow":
                assert ra.verdict == rb.verdict and ra.certificate == rb.certificate


def test_seeded_reports_identical(two_relay):
    a = check_feasibility(two_relay, FeasibilityParams(seed=7, oracle="off"))
    b = check_feasibility(two_relay, FeasibilityParams(seed=7, oracle="off"))
    assert a.to_dict() == b.to_dict()


def test_report_round_trip(two_relay, bottleneck, diamond, disjoint):
    for xnet in (two_relay, bottleneck, diamond, disjoint):
        d = check_feasibility(xnet, FeasibilityParams(seed=2)).to_dict()
        assert FeasibilityReport.from_dict(d).to_dict() == d


def test_oracle_modes_agree(two_relay, bottleneck):
    for xnet in (two_relay, bottleneck):
        verdicts = {
            mode: [c.verdict for c in check_feasibility(xnet, FeasibilityParams(oracle=mode)).conditions]
            for mode in ("auto", "force", "off")
        }
        assert verdicts["auto"] == verdicts["force"] == verdicts["off"]
    forced = check_feasibility(two_relay, FeasibilityParams(oracle="force"))
    assert {c.method for c in forced.conditions} == {"oracle"}
    assert forced.error_bound == 0.0


def test_oracle_force_over_cap_raises(two_relay):
    with pytest.raises(OracleScaleExceeded):
        check_feasibility(two_relay, FeasibilityParams(oracle="force"), cap=OracleCap(max_edges=5))
    r = check_feasibility(two_relay, FeasibilityParams(oracle="auto"), cap=OracleCap(max_edges=5))
    assert r.eta_constancy["method"] == "randomized"
    assert r.error_bound > 0


def test_min_cut_warning():
    arcs = [(0, 1), (0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (3, 5), (0, 4)]
    x = extend(make(arcs, [(0, 1), (2, 4), (0, 5)]))
    r = check_feasibility(x, FeasibilityParams())
    assert any("min-cut 2" in w for w in r.warnings)


def test_random_graphs_match_oracle_verdicts():
    rng = np.random.default_rng(31)
    for _ in range(25):
        x = extend(random_network(rng))
        auto = check_feasibility(x, FeasibilityParams(seed=4, oracle="off"))
        exact = check_feasibility(x, FeasibilityParams(oracle="force"))
        assert [c.verdict for c in auto.conditions] == [c.verdict for c in exact.conditions]
        assert auto.regime == exact.regime


def test_mixed_only_violation(crossed):
    # two shared edges make the three terms of the session-1 form cancel in pairs
    off = check_feasibility(crossed, FeasibilityParams(seed=3, oracle="off"))
    assert off.regime == "general" and not off.feasible
    assert [c.condition.label for c in off.violated] == ["p1!=eta/(1+eta)"]
    rec = off.condition("p1!=eta/(1+eta)")
    assert rec.method == "randomized" and rec.trials == 32
    assert rec.error_contribution == pytest.approx(off.per_trial_error ** 32)
    auto = check_feasibility(crossed, FeasibilityParams(seed=3))
    assert auto.condition("p1!=eta/(1+eta)").method == "oracle"
    assert [c.condition.label for c in auto.violated] == ["p1!=eta/(1+eta)"]


def test_mixed_violation_follows_session_relabelling(crossed):
    base = crossed.base
    swapped = extend(type(base)(base.nodes, base.edges, (base.sessions[1], base.sessions[0], base.sessions[2])))
    r = check_feasibility(swapped, FeasibilityParams(seed=3, oracle="off"))
    assert [c.condition.label for c in r.violated] == ["p2!=1+eta"]


def test_mixed_form_zero_at_every_point(crossed):
    from pbna.feasibility import mixed_form_value
    from pbna.transfer import sample_coding_vector

    rng = np.random.default_rng(0)
    for _ in range(20):
        cv = sample_coding_vector(crossed, F16, rng)
        assert mixed_form_value(crossed, F16, 1, cv.values) == 0
