from .kinematics import (
    ACTIONS,
    ActionLabel,
    KinematicContext,
    NormalizationConstants,
    feasible_acceleration,
    feasible_speed,
    predicted_gap,
)

__all__ = [
    'ACTIONS',
    'ActionLabel',
    'KinematicContext',
    'NormalizationConstants',
    'feasible_acceleration',
    'feasible_speed',
    'predicted_gap',
]
