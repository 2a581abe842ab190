import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from services.errors import ContractViolation

# Column order used by the mapping model
OBSERVATION_FIELDS = ("d01_y", "dv01_x", "d01_x", "d_ahead", "v1_x")


@dataclass(frozen=True)
class EnvironmentObservation:
    """
    Environment variables observed at one timestep.

    d01_y and dv01_x describe the lateral/relative-speed relation of the pair,
    d01_x the longitudinal gap, d_ahead and v1_x the ramp vehicle's
    constraints ahead. dv01_x is v0 - v1 (positive while P0 closes in).
    """
    d01_y: float
    dv01_x: float
    d01_x: float
    d_ahead: float
    v1_x: float

    def __post_init__(self):
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise ContractViolation(f"{f.name} must be finite")
        for name in ("d01_y", "d01_x", "d_ahead", "v1_x"):
            if getattr(self, name) < 0:
                raise ContractViolation(f"{name} must be >= 0, got {getattr(self, name)}")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)
