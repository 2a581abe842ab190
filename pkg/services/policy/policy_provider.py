from abc import ABC, abstractmethod

from services.mapping.adaptive import AdaptiveDecision
from services.mapping.observation import EnvironmentObservation
from services.scenario.kinematics import (
    DEFAULT_A_BOUNDS,
    KinematicContext,
    NormalizationConstants,
)


class DecisionPolicy(ABC):
    """
    Abstract base class for decision sources.
    All policies replayed or evaluated against demonstrations inherit from this class.
    """
    name = "policy"

    def __init__(self, norms: NormalizationConstants, a_bounds: tuple[float, float] = DEFAULT_A_BOUNDS):
        self.norms = norms
        self.a_bounds = a_bounds

    @abstractmethod
    def decide(self, ctx: KinematicContext, obs: EnvironmentObservation) -> AdaptiveDecision:
        """
        Decide both players' behaviour for one timestep.

        Args:
            ctx: Kinematic state of the pair
            obs: Environment observation at the same timestep

        Returns:
            AdaptiveDecision: strategies, chosen actions and the weights used
        """
        pass
