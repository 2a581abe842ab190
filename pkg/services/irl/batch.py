"""Runs the per-timestep optimizer over calibrated sequences."""
import logging
from dataclasses import dataclass
from typing import Iterable

from services.calibration.sequence import InteractionSequence
from services.game.payoffs import WeightVector
from services.irl.optimizer import Demonstration, IrlConfig, optimize_weights
from services.mapping.observation import EnvironmentObservation
from services.scenario.kinematics import DEFAULT_A_BOUNDS, NormalizationConstants

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeightSample:
    sequence_id: str
    frame: int
    obs: EnvironmentObservation
    lambda0: WeightVector
    lambda1: WeightVector
    iterations: int
    converged: bool
    reconstructed: bool


def optimize_sequence(
    seq: InteractionSequence,
    norms: NormalizationConstants,
    cfg: IrlConfig,
    a_bounds: tuple[float, float] = DEFAULT_A_BOUNDS,
) -> list[WeightSample]:
    samples = []
    for step in seq.timesteps:
        result = optimize_weights(Demonstration(step.ctx, step.label0, step.label1), norms, cfg, a_bounds)
        samples.append(WeightSample(
            sequence_id=seq.sequence_id,
            frame=step.frame,
            obs=step.obs,
            lambda0=result.lambda0,
            lambda1=result.lambda1,
            iterations=result.iterations,
            converged=result.converged,
            reconstructed=result.reconstructed,
        ))
    return samples


def optimize_sequences(
    sequences: Iterable[InteractionSequence],
    norms: NormalizationConstants,
    cfg: IrlConfig,
    a_bounds: tuple[float, float] = DEFAULT_A_BOUNDS,
) -> list[WeightSample]:
    samples = []
    for seq in sequences:
        samples.extend(optimize_sequence(seq, norms, cfg, a_bounds))
    if samples:
        converged = sum(s.converged for s in samples)
        reconstructed = sum(s.reconstructed for s in samples)
        logger.info(
            "Optimized %d timesteps: %d converged, reconstruction rate %.2f%%",
            len(samples), converged, 100.0 * reconstructed / len(samples),
        )
    return samples
