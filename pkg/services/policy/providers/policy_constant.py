from services.game.equilibrium import MixedStrategy
from services.game.payoffs import WeightVector
from services.mapping.adaptive import AdaptiveDecision
from services.mapping.observation import EnvironmentObservation
from services.scenario.kinematics import ActionLabel, KinematicContext
from ..policy_provider import DecisionPolicy


class ConstantActionPolicy(DecisionPolicy):
    """Ego always plays one action; the other vehicle is left undecided."""
    action = ActionLabel.YIELD

    def decide(self, ctx: KinematicContext, obs: EnvironmentObservation) -> AdaptiveDecision:
        midpoint = WeightVector(0.5, 0.5)
        return AdaptiveDecision(
            sigma0=MixedStrategy.pure(self.action),
            sigma1=MixedStrategy(0.5),
            q0=self.action,
            q1=ActionLabel.YIELD,
            lambda0=midpoint,
            lambda1=midpoint,
            degenerate=False,
        )


class AlwaysYieldPolicy(ConstantActionPolicy):
    name = "always_yield"
    action = ActionLabel.YIELD


class AlwaysNYieldPolicy(ConstantActionPolicy):
    name = "always_nyield"
    action = ActionLabel.NYIELD
