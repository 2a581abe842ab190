from .observation import OBSERVATION_FIELDS, EnvironmentObservation
from .model import (
    LATENT_DIMS,
    MappingModel,
    WeightInference,
    bin_center,
    discretize_weight,
    infer_weights,
    train_mapping,
)
from .adaptive import AdaptiveDecision, adaptive_decide, decide_with_weights

__all__ = [
    'OBSERVATION_FIELDS',
    'EnvironmentObservation',
    'LATENT_DIMS',
    'MappingModel',
    'WeightInference',
    'bin_center',
    'discretize_weight',
    'infer_weights',
    'train_mapping',
    'AdaptiveDecision',
    'adaptive_decide',
    'decide_with_weights',
]
