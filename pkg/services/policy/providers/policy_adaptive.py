from services.mapping.adaptive import AdaptiveDecision, adaptive_decide
from services.mapping.model import MappingModel
from services.mapping.observation import EnvironmentObservation
from services.scenario.kinematics import DEFAULT_A_BOUNDS, KinematicContext
from ..policy_provider import DecisionPolicy


class AdaptivePolicy(DecisionPolicy):
    name = "adaptive"

    def __init__(self, norms, a_bounds=DEFAULT_A_BOUNDS, model: MappingModel | None = None):
        super().__init__(norms, a_bounds)
        if model is None:
            raise ValueError("Adaptive policy needs a trained mapping model.")
        self.model = model

    def decide(self, ctx: KinematicContext, obs: EnvironmentObservation) -> AdaptiveDecision:
        return adaptive_decide(self.model, ctx, obs, self.norms, self.a_bounds)
