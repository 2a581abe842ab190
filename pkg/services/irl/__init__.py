from .optimizer import (
    Demonstration,
    GradientVector,
    IrlConfig,
    IrlResult,
    UpdateDirection,
    average_weights,
    empirical_features,
    expected_features,
    gradient_step,
    optimize_weights,
    project_to_simplex,
)

__all__ = [
    'Demonstration',
    'GradientVector',
    'IrlConfig',
    'IrlResult',
    'UpdateDirection',
    'average_weights',
    'empirical_features',
    'expected_features',
    'gradient_step',
    'optimize_weights',
    'project_to_simplex',
]
