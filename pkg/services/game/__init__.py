from .payoffs import (
    FeatureMatrix,
    PayoffMatrix,
    WeightVector,
    build_payoffs,
    feature_matrices,
)
from .equilibrium import (
    EquilibriumKind,
    EquilibriumSolution,
    MixedStrategy,
    decide,
    deviation_gains,
    equilibrium_objective,
    satisfies_constraints,
    solve_equilibrium,
)

__all__ = [
    'FeatureMatrix',
    'PayoffMatrix',
    'WeightVector',
    'build_payoffs',
    'feature_matrices',
    'EquilibriumKind',
    'EquilibriumSolution',
    'MixedStrategy',
    'decide',
    'deviation_gains',
    'equilibrium_objective',
    'satisfies_constraints',
    'solve_equilibrium',
]
