from dataclasses import dataclass

import numpy as np

from services.game.equilibrium import EquilibriumSolution, MixedStrategy, decide, solve_equilibrium
from services.game.payoffs import WeightVector, build_payoffs, feature_matrices
from services.mapping.model import MappingModel, infer_weights
from services.mapping.observation import EnvironmentObservation
from services.scenario.kinematics import (
    DEFAULT_A_BOUNDS,
    ActionLabel,
    KinematicContext,
    NormalizationConstants,
)


@dataclass(frozen=True, eq=False)
class AdaptiveDecision:
    sigma0: MixedStrategy
    sigma1: MixedStrategy
    q0: ActionLabel
    q1: ActionLabel
    lambda0: WeightVector
    lambda1: WeightVector
    degenerate: bool
    posterior0: np.ndarray | None = None
    posterior1: np.ndarray | None = None


def decide_with_weights(
    ctx: KinematicContext,
    lambda0: WeightVector,
    lambda1: WeightVector,
    norms: NormalizationConstants,
    a_bounds: tuple[float, float] = DEFAULT_A_BOUNDS,
) -> EquilibriumSolution:
    f0, f1 = feature_matrices(ctx, norms, a_bounds)
    return solve_equilibrium(build_payoffs(f0, lambda0), build_payoffs(f1, lambda1))


def adaptive_decide(
    model: MappingModel,
    ctx: KinematicContext,
    obs: EnvironmentObservation,
    norms: NormalizationConstants,
    a_bounds: tuple[float, float] = DEFAULT_A_BOUNDS,
) -> AdaptiveDecision:
    """Online step: infer weights from the environment, solve the game, pick P0's action."""
    inferred = infer_weights(model, obs)
    solution = decide_with_weights(ctx, inferred.lambda0, inferred.lambda1, norms, a_bounds)
    return AdaptiveDecision(
        sigma0=solution.sigma0,
        sigma1=solution.sigma1,
        q0=decide(solution.sigma0),
        q1=decide(solution.sigma1),
        lambda0=inferred.lambda0,
        lambda1=inferred.lambda1,
        degenerate=solution.degenerate,
        posterior0=inferred.posterior0,
        posterior1=inferred.posterior1,
    )
