from services.scenario.kinematics import DEFAULT_A_BOUNDS, NormalizationConstants
from .policy_provider import DecisionPolicy
from services.policy.providers.policy_adaptive import AdaptivePolicy
from services.policy.providers.policy_constant import AlwaysNYieldPolicy, AlwaysYieldPolicy
from services.policy.providers.policy_fixed import FixedWeightPolicy


class PolicyFactory:
    """
    Factory class to create decision policies based on configuration.
    """
    @staticmethod
    def create_policy(
        policy_name: str,
        norms: NormalizationConstants,
        a_bounds: tuple[float, float] = DEFAULT_A_BOUNDS,
        **kwargs,
    ) -> DecisionPolicy:
        """
        Create a decision policy based on the policy name.

        Args:
            policy_name: The name of the policy to create
            norms: Feature normalization constants
            a_bounds: Acceleration bounds used by the game
            **kwargs: Additional policy-specific parameters (model, lambda0, lambda1)

        Returns:
            DecisionPolicy: An instance of the requested policy

        Raises:
            ValueError: If the policy name is not recognized
        """
        policies = {
            "adaptive": AdaptivePolicy,
            "fixed": FixedWeightPolicy,
            "always_yield": AlwaysYieldPolicy,
            "always_nyield": AlwaysNYieldPolicy,
        }

        policy_class = policies.get(policy_name.lower())
        if policy_class:
            return policy_class(norms, a_bounds, **kwargs)
        else:
            available_policies = ", ".join(policies.keys())
            raise ValueError(f"Unsupported policy: {policy_name}. Available policies: {available_policies}")
