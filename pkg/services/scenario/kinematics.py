"""
Physical state of a merging pair and the short-horizon kinematic prediction
every other service builds on.

P0 is the main-road vehicle, P1 the ramp vehicle. All quantities are
longitudinal and measured along the direction of travel.
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from services.errors import ContractViolation

DEFAULT_A_BOUNDS = (-4.0, 3.0)
DEFAULT_JERK = 1.0


class ActionLabel(str, Enum):
    NYIELD = "NYield"
    YIELD = "Yield"

    @property
    def index(self) -> int:
        """Row/column index inside a 2x2 game (0 = NYield, 1 = Yield)."""
        return ACTIONS.index(self)


# Fixed action order of every payoff and feature matrix
ACTIONS = (ActionLabel.NYIELD, ActionLabel.YIELD)


def _check_finite(**values: float):
    for name, value in values.items():
        if not math.isfinite(value):
            raise ContractViolation(f"{name} must be finite, got {value}")


@dataclass(frozen=True)
class KinematicContext:
    """Per-timestep state of the interacting pair."""
    gap_init: float
    gap_ahead: float
    v0: float
    v1: float
    a0: float = 0.0
    a1: float = 0.0
    jerk0_mag: float = DEFAULT_JERK
    jerk1_mag: float = DEFAULT_JERK
    horizon: float = 1.0

    def __post_init__(self):
        _check_finite(**{k: getattr(self, k) for k in self.__dataclass_fields__})
        for name in ("gap_init", "gap_ahead", "v0", "v1", "jerk0_mag", "jerk1_mag"):
            if getattr(self, name) < 0:
                raise ContractViolation(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.horizon <= 0:
            raise ContractViolation(f"horizon must be > 0, got {self.horizon}")


@dataclass(frozen=True)
class NormalizationConstants:
    t_norm: float = 5.0
    v_norm: float = 33.33
    d_norm: float = 100.0

    def __post_init__(self):
        for name in ("t_norm", "v_norm", "d_norm"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ContractViolation(f"{name} must be strictly positive, got {value}")


def feasible_acceleration(
    a_current: float,
    jerk_mag: float,
    horizon: float,
    action: ActionLabel,
    a_bounds: tuple[float, float] = DEFAULT_A_BOUNDS,
) -> float:
    """
    Acceleration reachable within the horizon when committing to an action.

    NYield ramps acceleration up at the jerk limit, Yield ramps it down.
    The result is clamped into a_bounds.
    """
    a_min, a_max = a_bounds
    if a_min > a_max:
        raise ContractViolation(f"invalid acceleration bounds {a_bounds}: min > max")
    if horizon <= 0:
        raise ContractViolation(f"horizon must be > 0, got {horizon}")
    if jerk_mag < 0:
        raise ContractViolation(f"jerk magnitude must be >= 0, got {jerk_mag}")

    delta = jerk_mag * horizon
    target = a_current + delta if action is ActionLabel.NYIELD else a_current - delta
    return float(np.clip(target, a_min, a_max))


def feasible_speed(v_current: float, a_des: float, horizon: float) -> float:
    """Speed after holding a_des over the horizon; vehicles never reverse."""
    if horizon <= 0:
        raise ContractViolation(f"horizon must be > 0, got {horizon}")
    return max(0.0, v_current + a_des * horizon)


def predicted_gap(
    gap_init: float,
    v0_des: float,
    v1_des: float,
    a0_des: float,
    a1_des: float,
    horizon: float,
) -> float:
    """
    Predicted P0-P1 gap after the horizon, floored at 0 (contact).

    The velocity term keeps its 0.5 coefficient.
    """
    if horizon <= 0:
        raise ContractViolation(f"horizon must be > 0, got {horizon}")
    gap = (
        abs(gap_init)
        + 0.5 * (abs(v1_des) - abs(v0_des)) * horizon
        + 0.5 * (a1_des - a0_des) * horizon ** 2
    )
    return max(0.0, gap)
