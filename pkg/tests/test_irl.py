import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from services.errors import ContractViolation
from services.game.equilibrium import MixedStrategy, decide
from services.game.payoffs import FeatureMatrix, WeightVector
from services.irl.batch import optimize_sequence
from services.irl.optimizer import (
    Demonstration,
    IrlConfig,
    UpdateDirection,
    average_weights,
    empirical_features,
    expected_features,
    gradient_step,
    optimize_weights,
    project_to_simplex,
)
from services.mapping.adaptive import decide_with_weights
from services.scenario.kinematics import ActionLabel, KinematicContext
from tests.conftest import make_sequence

NY, Y = ActionLabel.NYIELD, ActionLabel.YIELD


@pytest.mark.parametrize("raw, expected", [((0.5, 0.5), 0.5), ((1.2, 0.0), 1.0), ((0.7, 0.7), 0.5), ((-1.0, 2.0), 0.0)])
def test_project_to_simplex(raw, expected):
    projected = project_to_simplex(raw)
    assert projected.w1 == pytest.approx(expected)
    assert projected.w2 == pytest.approx(1.0 - expected)


def test_project_rejects_non_finite():
    with pytest.raises(ContractViolation):
        project_to_simplex([np.nan, 0.5])


def test_gradient_step_arithmetic():
    stepped = gradient_step(WeightVector(0.6, 0.4), np.array([0.2, -0.2]), 0.5, UpdateDirection.DESCENT)
    assert (stepped.w1, stepped.w2) == pytest.approx((0.5, 0.5))
    ascended = gradient_step(WeightVector(0.6, 0.4), np.array([0.2, -0.2]), 0.5, UpdateDirection.ASCENT)
    assert (ascended.w1, ascended.w2) == pytest.approx((0.7, 0.3))


def test_expected_features_examples():
    cells = np.array([[[1, 0], [0, 1]], [[2, 2], [3, 1]]], dtype=float)
    features = FeatureMatrix(cells, 0)
    np.testing.assert_allclose(expected_features(features, MixedStrategy(0.5), MixedStrategy(0.5)), [1.5, 1.0])
    np.testing.assert_array_equal(expected_features(features, MixedStrategy(1.0), MixedStrategy(0.0)), cells[0, 1])


def test_empirical_features_index_demonstrated_cell(example_ctx):
    cells = np.arange(8, dtype=float).reshape(2, 2, 2)
    features = FeatureMatrix(cells, 0)
    np.testing.assert_array_equal(empirical_features(features, Demonstration(example_ctx, NY, NY)), cells[0, 0])
    np.testing.assert_array_equal(empirical_features(features, Demonstration(example_ctx, Y, NY)), cells[1, 0])


@settings(max_examples=100, deadline=None)
@given(cells=arrays(np.float64, (2, 2, 2), elements=st.floats(0.0, 10.0, allow_nan=False)))
def test_empirical_equals_expected_for_one_hot_strategies(cells):
    features = FeatureMatrix(cells, 1)
    for a0 in ActionLabel:
        for a1 in ActionLabel:
            demo = Demonstration(KinematicContext(10.0, 10.0, 20.0, 20.0), a0, a1)
            np.testing.assert_allclose(
                empirical_features(features, demo),
                expected_features(features, MixedStrategy.pure(a0), MixedStrategy.pure(a1)),
            )


def test_constant_features_converge_immediately(norms):
    ctx = KinematicContext(gap_init=20.0, gap_ahead=80.0, v0=25.0, v1=25.0, jerk0_mag=0.0, jerk1_mag=0.0)
    cfg = IrlConfig(init0=WeightVector(0.3, 0.7), init1=WeightVector(0.9, 0.1))
    result = optimize_weights(Demonstration(ctx, NY, Y), norms, cfg)
    assert result.converged
    assert result.iterations == 1
    assert result.lambda0 == cfg.init0
    assert result.lambda1 == cfg.init1
    assert result.gradient_norms == (0.0, 0.0)


def test_matching_demonstration_is_a_fixed_point(example_ctx, norms):
    cfg = IrlConfig()
    solution = decide_with_weights(example_ctx, cfg.init0, cfg.init1, norms)
    demo = Demonstration(example_ctx, decide(solution.sigma0), decide(solution.sigma1))
    result = optimize_weights(demo, norms, cfg)
    assert result.iterations == 1
    assert result.lambda0 == cfg.init0
    assert result.reconstructed


def test_yield_demonstration_raises_safety_weight(example_ctx, norms):
    # (0.5, 0.5) predicts NYield for P0 at 30 m/s; demonstrated Yield
    result = optimize_weights(Demonstration(example_ctx, Y, NY), norms, IrlConfig())
    assert result.converged
    assert result.reconstructed
    assert result.lambda0.w1 > 0.5


def planted_demos(norms, count=200):
    rng = np.random.default_rng(3)
    planted0, planted1 = WeightVector(0.78, 0.22), WeightVector(0.3, 0.7)
    demos = []
    for _ in range(count):
        v0 = rng.uniform(15.0, 35.0)
        ctx = KinematicContext(
            gap_init=rng.uniform(20.0, 60.0),
            gap_ahead=rng.uniform(20.0, 200.0),
            v0=v0,
            v1=v0 + rng.uniform(-5.0, 5.0),
            a0=rng.uniform(-1.0, 1.0),
            a1=rng.uniform(-1.0, 1.0),
        )
        solution = decide_with_weights(ctx, planted0, planted1, norms)
        demos.append(Demonstration(ctx, decide(solution.sigma0), decide(solution.sigma1)))
    return demos


def test_planted_weights_are_recovered(norms):
    results = [optimize_weights(demo, norms, IrlConfig()) for demo in planted_demos(norms)]

    assert sum(r.reconstructed for r in results) >= 0.95 * len(results)
    assert sum(r.converged and max(r.gradient_norms) <= 1e-3 for r in results) >= 0.9 * len(results)


def test_default_update_ascends_the_feature_gradient():
    assert IrlConfig().direction is UpdateDirection.ASCENT
    assert IrlConfig(direction="descent").direction is UpdateDirection.DESCENT


def test_descent_recovers_fewer_planted_demos(norms):
    demos = planted_demos(norms)
    ascent = sum(optimize_weights(d, norms, IrlConfig()).reconstructed for d in demos)
    descent = sum(optimize_weights(d, norms, IrlConfig(direction="descent")).reconstructed for d in demos)
    assert descent < 0.95 * len(demos) <= ascent


def test_non_convergence_is_reported_not_raised(example_ctx, norms):
    result = optimize_weights(Demonstration(example_ctx, Y, NY), norms, IrlConfig(max_iters=2))
    assert not result.converged
    assert result.iterations == 2


def test_invalid_config_rejected():
    with pytest.raises(ContractViolation):
        IrlConfig(step=0.0)
    with pytest.raises(ContractViolation):
        IrlConfig(max_iters=0)


def test_average_weights_reprojects(example_ctx, norms):
    fits = [
        optimize_weights(Demonstration(example_ctx, Y, NY), norms, IrlConfig()),
        optimize_weights(Demonstration(example_ctx, NY, NY), norms, IrlConfig()),
    ]
    lambda0, lambda1 = average_weights(fits)
    assert lambda0.w1 == pytest.approx((fits[0].lambda0.w1 + fits[1].lambda0.w1) / 2)
    assert lambda0.w1 + lambda0.w2 == pytest.approx(1.0)
    with pytest.raises(ContractViolation):
        average_weights([])


def test_optimize_sequence_one_sample_per_timestep(example_ctx, norms):
    seq = make_sequence([example_ctx] * 3, labels=[(Y, NY), (NY, NY), (Y, NY)])
    samples = optimize_sequence(seq, norms, IrlConfig())
    assert [s.frame for s in samples] == [1, 2, 3]
    assert all(s.sequence_id == seq.sequence_id for s in samples)
    assert samples[1].iterations == 1


@settings(max_examples=1000, deadline=None)
@given(
    w=st.floats(0.0, 1.0),
    g=arrays(np.float64, 2, elements=st.floats(-10.0, 10.0, allow_nan=False)),
    step=st.floats(1e-4, 2.0),
)
def test_gradient_step_stays_on_simplex(w, g, step):
    for direction in UpdateDirection:
        stepped = gradient_step(WeightVector.from_w1(w), g, step, direction)
        assert 0.0 <= stepped.w1 <= 1.0
        assert stepped.w1 + stepped.w2 == pytest.approx(1.0, abs=1e-12)
