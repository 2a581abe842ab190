from services.game.equilibrium import decide
from services.game.payoffs import WeightVector
from services.mapping.adaptive import AdaptiveDecision, decide_with_weights
from services.mapping.observation import EnvironmentObservation
from services.scenario.kinematics import DEFAULT_A_BOUNDS, KinematicContext
from ..policy_provider import DecisionPolicy


class FixedWeightPolicy(DecisionPolicy):
    """Same weights on every frame; the comparison benchmark."""
    name = "fixed"

    def __init__(self, norms, a_bounds=DEFAULT_A_BOUNDS, lambda0: WeightVector | None = None, lambda1: WeightVector | None = None):
        super().__init__(norms, a_bounds)
        self.lambda0 = lambda0 or WeightVector(0.5, 0.5)
        self.lambda1 = lambda1 or WeightVector(0.5, 0.5)

    def decide(self, ctx: KinematicContext, obs: EnvironmentObservation) -> AdaptiveDecision:
        solution = decide_with_weights(ctx, self.lambda0, self.lambda1, self.norms, self.a_bounds)
        return AdaptiveDecision(
            sigma0=solution.sigma0,
            sigma1=solution.sigma1,
            q0=decide(solution.sigma0),
            q1=decide(solution.sigma1),
            lambda0=self.lambda0,
            lambda1=self.lambda1,
            degenerate=solution.degenerate,
        )
