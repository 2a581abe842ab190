from dataclasses import dataclass

from services.calibration.sequence import InteractionSequence
from services.game.payoffs import WeightVector
from services.policy.policy_provider import DecisionPolicy
from services.policy.providers.policy_fixed import FixedWeightPolicy
from services.scenario.kinematics import DEFAULT_A_BOUNDS, ActionLabel, NormalizationConstants


@dataclass(frozen=True)
class DecisionRecord:
    sequence_id: str
    source: str
    frame: int
    sigma0: float   # P(NYield) for P0
    sigma1: float   # P(NYield) for P1
    q0: ActionLabel
    q1: ActionLabel
    label0: ActionLabel
    label1: ActionLabel
    lambda0: WeightVector
    lambda1: WeightVector
    degenerate: bool

    def matches(self, which: str = "both") -> tuple[int, int]:
        """(matching points, compared points) for ego, other or both vehicles."""
        ego = int(self.q0 == self.label0)
        other = int(self.q1 == self.label1)
        if which == "ego":
            return ego, 1
        if which == "other":
            return other, 1
        return ego + other, 2


def decide_sequence(seq: InteractionSequence, policy: DecisionPolicy) -> list[DecisionRecord]:
    """Open-loop decisions on the recorded states of every timestep."""
    records = []
    for step in seq.timesteps:
        decision = policy.decide(step.ctx, step.obs)
        records.append(DecisionRecord(
            sequence_id=seq.sequence_id,
            source=seq.source,
            frame=step.frame,
            sigma0=decision.sigma0.p,
            sigma1=decision.sigma1.p,
            q0=decision.q0,
            q1=decision.q1,
            label0=step.label0,
            label1=step.label1,
            lambda0=decision.lambda0,
            lambda1=decision.lambda1,
            degenerate=decision.degenerate,
        ))
    return records


def fixed_weight_baseline(
    seq: InteractionSequence,
    lambda0: WeightVector,
    lambda1: WeightVector,
    norms: NormalizationConstants,
    a_bounds: tuple[float, float] = DEFAULT_A_BOUNDS,
) -> list[DecisionRecord]:
    return decide_sequence(seq, FixedWeightPolicy(norms, a_bounds, lambda0=lambda0, lambda1=lambda1))
