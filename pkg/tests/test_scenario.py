import pytest
from hypothesis import given, settings, strategies as st

from services.errors import ContractViolation
from services.scenario.kinematics import (
    ActionLabel,
    KinematicContext,
    NormalizationConstants,
    feasible_acceleration,
    feasible_speed,
    predicted_gap,
)


def test_feasible_acceleration_examples():
    assert feasible_acceleration(0.0, 1.0, 1.0, ActionLabel.NYIELD, (-4.0, 3.0)) == 1.0
    assert feasible_acceleration(0.0, 1.0, 1.0, ActionLabel.YIELD, (-4.0, 3.0)) == -1.0
    assert feasible_acceleration(0.5, 0.0, 2.0, ActionLabel.YIELD, (-4.0, 3.0)) == 0.5


def test_feasible_acceleration_clamps_to_bounds():
    assert feasible_acceleration(2.5, 1.0, 1.0, ActionLabel.NYIELD, (-4.0, 3.0)) == 3.0
    assert feasible_acceleration(-3.5, 1.0, 1.0, ActionLabel.YIELD, (-4.0, 3.0)) == -4.0


def test_feasible_acceleration_rejects_inverted_bounds():
    with pytest.raises(ContractViolation):
        feasible_acceleration(0.0, 1.0, 1.0, ActionLabel.NYIELD, (3.0, -4.0))


def test_feasible_speed_examples():
    assert feasible_speed(30.0, 1.0, 1.0) == 31.0
    assert feasible_speed(25.0, 0.0, 5.0) == 25.0
    assert feasible_speed(1.0, -4.0, 1.0) == 0.0


def test_predicted_gap_examples():
    assert predicted_gap(20.0, 30.0, 25.0, 0.0, 0.0, 1.0) == pytest.approx(17.5)
    assert predicted_gap(15.0, 27.0, 27.0, 0.3, 0.3, 3.0) == 15.0
    assert predicted_gap(20.0, 30.0, 25.0, -1.0, 1.0, 2.0) == pytest.approx(19.0)


def test_predicted_gap_floors_at_contact():
    assert predicted_gap(1.0, 40.0, 10.0, 3.0, -4.0, 1.0) == 0.0


@pytest.mark.parametrize("field, value", [("gap_init", -1.0), ("v0", -0.1), ("horizon", 0.0), ("a0", float("nan"))])
def test_context_rejects_invalid_values(field, value):
    kwargs = dict(gap_init=20.0, gap_ahead=80.0, v0=30.0, v1=25.0)
    kwargs[field] = value
    with pytest.raises(ContractViolation):
        KinematicContext(**kwargs)


def test_normalization_constants_must_be_positive():
    with pytest.raises(ContractViolation):
        NormalizationConstants(t_norm=0.0)


def test_action_indices_follow_game_order():
    assert ActionLabel.NYIELD.index == 0
    assert ActionLabel.YIELD.index == 1


speeds = st.floats(0.0, 40.0, allow_nan=False)
accels = st.floats(-4.0, 3.0, allow_nan=False)


@settings(max_examples=1000, deadline=None)
@given(gap=st.floats(0.0, 200.0), v=speeds, a=accels, horizon=st.floats(0.01, 5.0))
def test_equal_relative_motion_keeps_gap(gap, v, a, horizon):
    assert predicted_gap(gap, v, v, a, a, horizon) == pytest.approx(abs(gap))


@settings(max_examples=1000, deadline=None)
@given(a=accels, jerk=st.floats(0.0, 10.0), horizon=st.floats(0.01, 5.0))
def test_feasible_acceleration_stays_in_bounds(a, jerk, horizon):
    for action in ActionLabel:
        assert -4.0 <= feasible_acceleration(a, jerk, horizon, action) <= 3.0
    assert (
        feasible_acceleration(a, jerk, horizon, ActionLabel.NYIELD)
        >= feasible_acceleration(a, jerk, horizon, ActionLabel.YIELD)
    )
