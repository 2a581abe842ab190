"""
Per-timestep reward-weight recovery by expected-feature matching.

For one demonstrated joint action the loop builds the game from the current
weights, solves it, and moves each player's weights by the residual between
the demonstrated (empirical) and the equilibrium-expected features, projecting
back onto the unit simplex after every step.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

from services.errors import ContractViolation
from services.game.equilibrium import MixedStrategy, decide, solve_equilibrium
from services.game.payoffs import FeatureMatrix, WeightVector, build_payoffs, feature_matrices
from services.scenario.kinematics import (
    DEFAULT_A_BOUNDS,
    ActionLabel,
    KinematicContext,
    NormalizationConstants,
)

logger = logging.getLogger(__name__)


class UpdateDirection(str, Enum):
    # lambda + step * g: raises the reward of the demonstrated cell
    ASCENT = "ascent"
    # lambda - step * g
    DESCENT = "descent"


@dataclass(frozen=True)
class Demonstration:
    ctx: KinematicContext
    action0: ActionLabel
    action1: ActionLabel


@dataclass(frozen=True)
class IrlConfig:
    step: float = 0.1
    tol: float = 1e-3
    max_iters: int = 500
    init0: WeightVector = field(default_factory=lambda: WeightVector(0.5, 0.5))
    init1: WeightVector = field(default_factory=lambda: WeightVector(0.5, 0.5))
    direction: UpdateDirection = UpdateDirection.ASCENT

    def __post_init__(self):
        if not (math.isfinite(self.step) and self.step > 0):
            raise ContractViolation(f"step must be > 0, got {self.step}")
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise ContractViolation(f"tol must be > 0, got {self.tol}")
        if self.max_iters < 1:
            raise ContractViolation(f"max_iters must be >= 1, got {self.max_iters}")
        object.__setattr__(self, "direction", UpdateDirection(self.direction))


@dataclass(frozen=True, eq=False)
class GradientVector:
    """Feature-matching residual (empirical - expected) of both players."""
    g0: np.ndarray
    g1: np.ndarray

    def norms(self) -> tuple[float, float]:
        return float(np.linalg.norm(self.g0)), float(np.linalg.norm(self.g1))


@dataclass(frozen=True)
class IrlResult:
    lambda0: WeightVector
    lambda1: WeightVector
    iterations: int
    converged: bool
    gradient_norms: tuple[float, float]
    # Recovered weights re-predict the demonstrated joint action
    reconstructed: bool


def project_to_simplex(raw) -> WeightVector:
    """Euclidean projection of a 2-vector onto {w >= 0, w1 + w2 = 1}."""
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (2,) or not np.all(np.isfinite(raw)):
        raise ContractViolation(f"expected a finite 2-vector, got {raw}")
    # Move along (1, -1)/2 onto the line, then clamp to the segment
    w1 = float(np.clip(0.5 * (raw[0] - raw[1] + 1.0), 0.0, 1.0))
    return WeightVector.from_w1(w1)


def expected_features(features: FeatureMatrix, sigma0: MixedStrategy, sigma1: MixedStrategy) -> np.ndarray:
    return np.einsum("j,k,jkc->c", sigma0.as_array(), sigma1.as_array(), features.cells)


def empirical_features(features: FeatureMatrix, demo: Demonstration) -> np.ndarray:
    return features.cells[demo.action0.index, demo.action1.index].copy()


def gradient_step(
    weights: WeightVector,
    gradient: np.ndarray,
    step: float,
    direction: UpdateDirection = UpdateDirection.DESCENT,
) -> WeightVector:
    sign = -1.0 if UpdateDirection(direction) is UpdateDirection.DESCENT else 1.0
    return project_to_simplex(weights.as_array() + sign * step * np.asarray(gradient))


def feature_gradient(
    f0: FeatureMatrix,
    f1: FeatureMatrix,
    lambda0: WeightVector,
    lambda1: WeightVector,
    demo: Demonstration,
) -> tuple[GradientVector, MixedStrategy, MixedStrategy]:
    solution = solve_equilibrium(build_payoffs(f0, lambda0), build_payoffs(f1, lambda1))
    g0 = empirical_features(f0, demo) - expected_features(f0, solution.sigma0, solution.sigma1)
    g1 = empirical_features(f1, demo) - expected_features(f1, solution.sigma0, solution.sigma1)
    return GradientVector(g0, g1), solution.sigma0, solution.sigma1


def optimize_weights(
    demo: Demonstration,
    norms: NormalizationConstants,
    cfg: IrlConfig,
    a_bounds: tuple[float, float] = DEFAULT_A_BOUNDS,
) -> IrlResult:
    """
    Recover (lambda0, lambda1) for one demonstrated timestep.

    Runs until both players' residual norms are within tol, or max_iters.
    Non-convergence is reported through the result, never raised.
    """
    f0, f1 = feature_matrices(demo.ctx, norms, a_bounds)
    lambda0, lambda1 = cfg.init0, cfg.init1

    for iteration in range(1, cfg.max_iters + 1):
        gradient, sigma0, sigma1 = feature_gradient(f0, f1, lambda0, lambda1, demo)
        n0, n1 = gradient.norms()
        if n0 <= cfg.tol and n1 <= cfg.tol:
            return IrlResult(
                lambda0, lambda1, iteration, True, (n0, n1),
                reconstructed=(decide(sigma0), decide(sigma1)) == (demo.action0, demo.action1),
            )
        lambda0 = gradient_step(lambda0, gradient.g0, cfg.step, cfg.direction)
        lambda1 = gradient_step(lambda1, gradient.g1, cfg.step, cfg.direction)

    gradient, sigma0, sigma1 = feature_gradient(f0, f1, lambda0, lambda1, demo)
    n0, n1 = gradient.norms()
    converged = n0 <= cfg.tol and n1 <= cfg.tol
    logger.debug("IRL stopped after %d iterations (|g0|=%.4g, |g1|=%.4g)", cfg.max_iters, n0, n1)
    return IrlResult(
        lambda0, lambda1, cfg.max_iters, converged, (n0, n1),
        reconstructed=(decide(sigma0), decide(sigma1)) == (demo.action0, demo.action1),
    )


def average_weights(results: Iterable[IrlResult]) -> tuple[WeightVector, WeightVector]:
    """Window average of recovered weights, re-projected onto the simplex."""
    results = list(results)
    if not results:
        raise ContractViolation("cannot average an empty window")
    mean0 = np.mean([r.lambda0.as_array() for r in results], axis=0)
    mean1 = np.mean([r.lambda1.as_array() for r in results], axis=0)
    return project_to_simplex(mean0), project_to_simplex(mean1)
