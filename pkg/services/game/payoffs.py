"""
Feature and payoff matrices of the 2x2 merging game.

Cell [j][k] holds the joint action (P0 plays ACTIONS[j], P1 plays ACTIONS[k]),
so index 0 is NYield and index 1 is Yield on both axes.
"""
import math
from dataclasses import dataclass

import numpy as np

from services.errors import ContractViolation
from services.scenario.kinematics import (
    ACTIONS,
    DEFAULT_A_BOUNDS,
    KinematicContext,
    NormalizationConstants,
    feasible_acceleration,
    feasible_speed,
    predicted_gap,
)

SIMPLEX_TOL = 1e-9
# Speeds in feature denominators are floored here
MIN_SPEED = 0.1


@dataclass(frozen=True)
class WeightVector:
    """Reward weights of one player, kept on the unit simplex."""
    w1: float
    w2: float

    def __post_init__(self):
        if not (math.isfinite(self.w1) and math.isfinite(self.w2)):
            raise ContractViolation(f"weights must be finite, got ({self.w1}, {self.w2})")
        if self.w1 < -SIMPLEX_TOL or self.w2 < -SIMPLEX_TOL or abs(self.w1 + self.w2 - 1.0) > SIMPLEX_TOL:
            raise ContractViolation(f"weights ({self.w1}, {self.w2}) are not on the unit simplex")

    @classmethod
    def from_w1(cls, w1: float) -> "WeightVector":
        return cls(float(w1), float(1.0 - w1))

    def as_array(self) -> np.ndarray:
        return np.array([self.w1, self.w2])


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Per-cell 2-component feature vectors for one player, shape (2, 2, 2)."""
    cells: np.ndarray
    player: int

    def __post_init__(self):
        cells = _frozen(self.cells)
        if cells.shape != (2, 2, 2):
            raise ContractViolation(f"feature cells must have shape (2, 2, 2), got {cells.shape}")
        if not np.all(np.isfinite(cells)) or np.any(cells < 0):
            raise ContractViolation("feature entries must be finite and >= 0")
        if self.player not in (0, 1):
            raise ContractViolation(f"player must be 0 or 1, got {self.player}")
        object.__setattr__(self, "cells", cells)


@dataclass(frozen=True, eq=False)
class PayoffMatrix:
    """2x2 rewards of one player: u[j][k] for P0 action j, P1 action k."""
    u: np.ndarray
    player: int

    def __post_init__(self):
        u = _frozen(self.u)
        if u.shape != (2, 2):
            raise ContractViolation(f"payoff matrix must have shape (2, 2), got {u.shape}")
        object.__setattr__(self, "u", u)


def feature_matrices(
    ctx: KinematicContext,
    norms: NormalizationConstants,
    a_bounds: tuple[float, float] = DEFAULT_A_BOUNDS,
) -> tuple[FeatureMatrix, FeatureMatrix]:
    """
    Build both players' feature matrices for one timestep.

    P0: [gap / (v0 * t_norm), v0_des / v_norm]
    P1: [gap_ahead / (v1 * t_norm), gap / d_norm]
    where gap is the predicted P0-P1 gap under the joint action.
    """
    v0 = max(ctx.v0, MIN_SPEED)
    v1 = max(ctx.v1, MIN_SPEED)
    f0 = np.zeros((2, 2, 2))
    f1 = np.zeros((2, 2, 2))

    for j, q0 in enumerate(ACTIONS):
        a0_des = feasible_acceleration(ctx.a0, ctx.jerk0_mag, ctx.horizon, q0, a_bounds)
        v0_des = feasible_speed(ctx.v0, a0_des, ctx.horizon)
        for k, q1 in enumerate(ACTIONS):
            a1_des = feasible_acceleration(ctx.a1, ctx.jerk1_mag, ctx.horizon, q1, a_bounds)
            v1_des = feasible_speed(ctx.v1, a1_des, ctx.horizon)
            gap = predicted_gap(ctx.gap_init, v0_des, v1_des, a0_des, a1_des, ctx.horizon)

            f0[j, k] = (gap / (v0 * norms.t_norm), v0_des / norms.v_norm)
            f1[j, k] = (ctx.gap_ahead / (v1 * norms.t_norm), gap / norms.d_norm)

    return FeatureMatrix(f0, player=0), FeatureMatrix(f1, player=1)


def build_payoffs(features: FeatureMatrix, weights: WeightVector) -> PayoffMatrix:
    """Rewards are linear in the features: u[j][k] = w . f[j][k]."""
    return PayoffMatrix(features.cells @ weights.as_array(), player=features.player)
