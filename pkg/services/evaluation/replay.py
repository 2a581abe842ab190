"""
Closed-loop replay: the ego vehicle follows the policy's decisions through
the kinematic model while the other vehicle replays its recorded speeds.
"""
import logging
import math
from dataclasses import dataclass, replace

from services.calibration.sequence import InteractionSequence
from services.config import KinematicsSettings
from services.errors import ContractViolation
from services.policy.policy_provider import DecisionPolicy
from services.scenario.kinematics import ActionLabel, KinematicContext, feasible_acceleration

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReplayStep:
    time: float
    frame: int
    gap: float
    v0: float
    a0: float
    q0: ActionLabel
    violation: bool


@dataclass(frozen=True)
class ReplayResult:
    sequence_id: str
    trajectory: tuple[ReplayStep, ...]
    violations: int

    @property
    def min_gap(self) -> float:
        return min(step.gap for step in self.trajectory)


def closed_loop_replay(
    seq: InteractionSequence,
    policy: DecisionPolicy,
    dt_sim: float | None = None,
    safety_gap: float = 0.0,
    kinematics: KinematicsSettings = KinematicsSettings(),
) -> ReplayResult:
    """
    Replay one sequence with the ego driven by the policy.

    The policy decides once per recorded frame; between frames the ego is
    integrated with steps of at most dt_sim while the other vehicle's speed is
    interpolated linearly. Every integrated state with gap <= safety_gap is a
    violation.
    """
    dt_sim = dt_sim or seq.dt
    if dt_sim <= 0:
        raise ContractViolation(f"dt_sim must be > 0, got {dt_sim}")

    first = seq.timesteps[0].ctx
    gap, v0, a0 = first.gap_init, first.v0, first.a0
    time = 0.0
    trajectory = []
    violations = 0

    for t, step in enumerate(seq.timesteps):
        recorded = step.ctx
        ctx = replace(recorded, gap_init=max(gap, 0.0), v0=v0, a0=a0)
        obs = replace(step.obs, d01_x=max(gap, 0.0), dv01_x=v0 - recorded.v1)
        q0 = policy.decide(ctx, obs).q0

        violation = gap <= safety_gap
        violations += violation
        trajectory.append(ReplayStep(time, step.frame, gap, v0, a0, q0, violation))

        if t + 1 == len(seq.timesteps):
            break
        nxt = seq.timesteps[t + 1]
        interval = (nxt.frame - step.frame) * seq.dt
        substeps = max(1, math.ceil(interval / dt_sim - 1e-9))
        h = interval / substeps
        for n in range(substeps):
            a0 = feasible_acceleration(a0, kinematics.jerk, h, q0, kinematics.a_bounds)
            v_next = max(0.0, v0 + a0 * h)
            # other's speed interpolated across the frame interval
            alpha0, alpha1 = n / substeps, (n + 1) / substeps
            v1_start = recorded.v1 + alpha0 * (nxt.ctx.v1 - recorded.v1)
            v1_end = recorded.v1 + alpha1 * (nxt.ctx.v1 - recorded.v1)
            gap += 0.5 * (v1_start + v1_end) * h - 0.5 * (v0 + v_next) * h
            v0 = v_next
            time += h
            if n + 1 < substeps:
                violation = gap <= safety_gap
                violations += violation
                trajectory.append(ReplayStep(time, step.frame, gap, v0, a0, q0, violation))

    result = ReplayResult(seq.sequence_id, tuple(trajectory), violations)
    if violations:
        logger.info("Replay of %s: %d violating steps (min gap %.2f m)", seq.sequence_id, violations, result.min_gap)
    return result
