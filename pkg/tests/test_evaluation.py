import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from services.config import KinematicsSettings
from services.errors import ContractViolation
from services.evaluation.metrics import as_percent, build_report, match_rate, similarity_rate
from services.evaluation.records import DecisionRecord, decide_sequence, fixed_weight_baseline
from services.evaluation.replay import closed_loop_replay
from services.game.payoffs import WeightVector
from services.mapping.model import MappingModel
from services.policy.policy_factory import PolicyFactory
from services.scenario.kinematics import ActionLabel, KinematicContext, NormalizationConstants
from tests.conftest import make_sequence

NY, Y = ActionLabel.NYIELD, ActionLabel.YIELD
MID = WeightVector(0.5, 0.5)


def record(q0, label0, q1=NY, label1=NY, sequence_id="s:1", frame=1, source="s"):
    return DecisionRecord(sequence_id, source, frame, 1.0 if q0 is NY else 0.0, 1.0, q0, q1, label0, label1, MID, MID, False)


def test_similarity_counts_round_to_two_decimals():
    assert as_percent(match_rate(1925, 2316)) == 83.12
    assert as_percent(match_rate(9467, 11583)) == 81.73


def test_match_rate_contract():
    assert match_rate(3, 4) == 0.75
    with pytest.raises(ContractViolation):
        match_rate(1, 0)
    with pytest.raises(ContractViolation):
        match_rate(5, 4)


def test_similarity_counts_both_vehicles():
    records = [record(Y, Y), record(Y, NY, frame=2)]
    assert similarity_rate(records) == 0.75
    assert similarity_rate(records, "ego") == 0.5
    assert similarity_rate(records, "other") == 1.0
    with pytest.raises(ContractViolation):
        similarity_rate([])


def test_report_dynamic_subset_and_sources():
    records = [
        record(Y, Y, sequence_id="a:1", source="a", frame=1),
        record(NY, NY, sequence_id="a:1", source="a", frame=2),
        record(NY, Y, sequence_id="b:7", source="b", frame=1),
        record(NY, Y, sequence_id="b:7", source="b", frame=2),
    ]
    report = build_report(records, violations={"a:1": 0, "b:7": 2}, baselines={"fixed": 0.5})
    assert (report.sequences, report.points, report.matches) == (2, 8, 6)
    assert report.similarity_percent == 75.0
    assert report.dynamic_sequences == 1
    assert report.dynamic_similarity == 1.0
    assert report.violations == 1
    assert report.violation_rate_percent == 50.0
    assert report.per_source["a"]["similarity"] == 1.0
    assert report.per_source["b"]["matches"] == 2
    assert round(report.similarity * report.points) == report.matches
    assert report.to_dict()["baselines"] == {"fixed": 0.5}


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(list(ActionLabel)), st.sampled_from(list(ActionLabel))), min_size=1, max_size=30), st.randoms())
def test_similarity_is_permutation_invariant(pairs, random):
    records = [record(q, label, frame=i) for i, (q, label) in enumerate(pairs)]
    shuffled = records[:]
    random.shuffle(shuffled)
    assert similarity_rate(records) == similarity_rate(shuffled)


def receding_sequence():
    contexts = [KinematicContext(gap_init=10.0 + 0.2 * i, gap_ahead=100.0, v0=25.0, v1=30.0) for i in range(50)]
    return make_sequence(contexts)


def forced_contact_sequence():
    contexts = [
        KinematicContext(gap_init=max(1.0 - 0.05 * i, 0.0), gap_ahead=100.0, v0=30.0, v1=max(30.0 - 0.4 * i, 0.0))
        for i in range(50)
    ]
    return make_sequence(contexts)


def test_always_yield_against_receding_vehicle_is_safe(norms):
    policy = PolicyFactory.create_policy("always_yield", norms)
    result = closed_loop_replay(receding_sequence(), policy)
    assert result.violations == 0
    assert result.min_gap >= 10.0


def test_always_nyield_into_braking_leader_collides(norms):
    policy = PolicyFactory.create_policy("always_nyield", norms)
    result = closed_loop_replay(forced_contact_sequence(), policy)
    assert result.violations >= 1
    assert result.min_gap <= 0.0


def test_replay_substeps(norms):
    policy = PolicyFactory.create_policy("always_yield", norms)
    seq = receding_sequence()
    coarse = closed_loop_replay(seq, policy)
    fine = closed_loop_replay(seq, policy, dt_sim=0.01)
    assert len(coarse.trajectory) == len(seq)
    assert len(fine.trajectory) == 4 * (len(seq) - 1) + 1
    assert fine.trajectory[-1].time == pytest.approx(coarse.trajectory[-1].time)


def test_replay_is_deterministic(norms):
    policy = PolicyFactory.create_policy("always_nyield", norms)
    assert closed_loop_replay(forced_contact_sequence(), policy) == closed_loop_replay(forced_contact_sequence(), policy)


@settings(max_examples=50, deadline=None)
@given(low=st.floats(0.0, 5.0), extra=st.floats(0.0, 5.0))
def test_violations_monotone_in_safety_gap(low, extra):
    policy = PolicyFactory.create_policy("always_nyield", NormalizationConstants())
    seq = forced_contact_sequence()
    a = closed_loop_replay(seq, policy, safety_gap=low).violations
    b = closed_loop_replay(seq, policy, safety_gap=low + extra).violations
    assert a <= b


def test_unknown_policy_lists_available(norms):
    with pytest.raises(ValueError, match="always_yield"):
        PolicyFactory.create_policy("reckless", norms)


def test_adaptive_policy_needs_model(norms):
    with pytest.raises(ValueError):
        PolicyFactory.create_policy("adaptive", norms)


def test_midpoint_baseline_equals_uniform_model(norms):
    seq = receding_sequence()
    baseline = fixed_weight_baseline(seq, MID, MID, norms)
    adaptive = decide_sequence(seq, PolicyFactory.create_policy("adaptive", norms, model=MappingModel.uniform()))
    assert [(r.q0, r.q1) for r in baseline] == [(r.q0, r.q1) for r in adaptive]


def test_baselines_disagree_where_features_rank_differently(norms):
    ctx = KinematicContext(gap_init=20.0, gap_ahead=80.0, v0=20.0, v1=20.0)
    seq = make_sequence([ctx] * 3)
    safe = fixed_weight_baseline(seq, WeightVector(0.8, 0.2), WeightVector(0.8, 0.2), norms)
    fast = fixed_weight_baseline(seq, WeightVector(0.2, 0.8), WeightVector(0.2, 0.8), norms)
    assert [r.q0 for r in safe] == [Y] * 3
    assert [r.q0 for r in fast] == [NY] * 3


def test_constant_features_make_baselines_identical(norms):
    ctx = KinematicContext(gap_init=20.0, gap_ahead=80.0, v0=25.0, v1=25.0, jerk0_mag=0.0, jerk1_mag=0.0)
    seq = make_sequence([ctx] * 3)
    decisions = {
        w: [(r.q0, r.q1) for r in fixed_weight_baseline(seq, WeightVector.from_w1(w), WeightVector.from_w1(w), norms)]
        for w in (0.2, 0.5, 0.8)
    }
    assert decisions[0.2] == decisions[0.5] == decisions[0.8]


def test_replay_respects_kinematic_bounds(norms):
    policy = PolicyFactory.create_policy("always_nyield", norms)
    kinematics = KinematicsSettings(a_bounds=(-2.0, 1.5))
    result = closed_loop_replay(receding_sequence(), policy, kinematics=kinematics)
    assert max(step.a0 for step in result.trajectory) <= 1.5
