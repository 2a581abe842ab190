"""
Mixed-strategy Nash equilibrium of a 2x2 bimatrix game.

Support enumeration specialised to two actions per player: pure profiles are
checked for mutual best response first, the interior equilibrium comes from
the indifference conditions. The mathematical-program form (constraints and
objective) is kept as an independent check of the solver.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from services.errors import ContractViolation
from services.game.payoffs import PayoffMatrix
from services.scenario.kinematics import ActionLabel

logger = logging.getLogger(__name__)

EQUILIBRIUM_TOL = 1e-9
TIE_TOL = 1e-12


class EquilibriumKind(str, Enum):
    PURE_DOMINANT = "PureDominant"
    PURE_BEST_RESPONSE = "PureBestResponse"
    MIXED_INTERIOR = "MixedInterior"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class MixedStrategy:
    """p is the probability of action index 0 (NYield); 1 - p goes to Yield."""
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and -EQUILIBRIUM_TOL <= self.p <= 1 + EQUILIBRIUM_TOL):
            raise ContractViolation(f"strategy probability must lie in [0, 1], got {self.p}")
        object.__setattr__(self, "p", float(min(1.0, max(0.0, self.p))))

    @classmethod
    def pure(cls, action: ActionLabel) -> "MixedStrategy":
        return cls(1.0 if action is ActionLabel.NYIELD else 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.p, 1.0 - self.p])


@dataclass(frozen=True)
class EquilibriumSolution:
    sigma0: MixedStrategy
    sigma1: MixedStrategy
    v0: float
    v1: float
    kind: EquilibriumKind

    @property
    def degenerate(self) -> bool:
        return self.kind is EquilibriumKind.DEGENERATE


def expected_value(u: np.ndarray, sigma0: MixedStrategy, sigma1: MixedStrategy) -> float:
    return float(sigma0.as_array() @ u @ sigma1.as_array())


def deviation_gains(
    sigma0: MixedStrategy, sigma1: MixedStrategy, u0: PayoffMatrix, u1: PayoffMatrix
) -> tuple[float, float]:
    """Best gain each player gets from a unilateral pure deviation."""
    s0, s1 = sigma0.as_array(), sigma1.as_array()
    row_values = u0.u @ s1
    col_values = s0 @ u1.u
    gain0 = float(np.max(row_values) - s0 @ row_values)
    gain1 = float(np.max(col_values) - col_values @ s1)
    return gain0, gain1


def satisfies_constraints(
    solution: EquilibriumSolution, u0: PayoffMatrix, u1: PayoffMatrix, tol: float = EQUILIBRIUM_TOL
) -> bool:
    """U0 s1' <= v0 E and (s0 U1)' <= v1 E, probabilities on the simplex."""
    s0, s1 = solution.sigma0.as_array(), solution.sigma1.as_array()
    return bool(
        np.all(u0.u @ s1 <= solution.v0 + tol)
        and np.all(s0 @ u1.u <= solution.v1 + tol)
        and np.all(s0 >= 0) and np.all(s1 >= 0)
        and abs(s0.sum() - 1.0) <= tol and abs(s1.sum() - 1.0) <= tol
    )


def equilibrium_objective(
    sigma0: MixedStrategy,
    sigma1: MixedStrategy,
    u0: PayoffMatrix,
    u1: PayoffMatrix,
    v0: float,
    v1: float,
) -> float:
    """s0 U0 s1' - v0 + s0 U1 s1' - v1; zero at an equilibrium with its own values."""
    return expected_value(u0.u, sigma0, sigma1) - v0 + expected_value(u1.u, sigma0, sigma1) - v1


def _strictly_dominant(diff: np.ndarray) -> bool:
    return bool(np.all(diff > TIE_TOL) or np.all(diff < -TIE_TOL))


def _pure_equilibria(a: np.ndarray, b: np.ndarray) -> list[tuple[int, int]]:
    found = []
    for j in range(2):
        for k in range(2):
            if a[j, k] >= a[1 - j, k] - TIE_TOL and b[j, k] >= b[j, 1 - k] - TIE_TOL:
                found.append((j, k))
    return found


def _best_response(values: np.ndarray) -> float:
    """Probability on index 0 for a best response to the given action values."""
    if abs(values[0] - values[1]) <= TIE_TOL:
        return 0.5
    return 1.0 if values[0] > values[1] else 0.0


def _solution(p: float, q: float, a: np.ndarray, b: np.ndarray, kind: EquilibriumKind) -> EquilibriumSolution:
    sigma0, sigma1 = MixedStrategy(p), MixedStrategy(q)
    return EquilibriumSolution(
        sigma0=sigma0,
        sigma1=sigma1,
        v0=expected_value(a, sigma0, sigma1),
        v1=expected_value(b, sigma0, sigma1),
        kind=kind,
    )


def _interior(a: np.ndarray, b: np.ndarray) -> tuple[float, float] | None:
    denom0 = a[0, 0] - a[0, 1] - a[1, 0] + a[1, 1]
    denom1 = b[0, 0] - b[0, 1] - b[1, 0] + b[1, 1]
    if abs(denom0) <= TIE_TOL or abs(denom1) <= TIE_TOL:
        return None
    # q makes P0 indifferent between rows, p makes P1 indifferent between columns
    q = (a[1, 1] - a[0, 1]) / denom0
    p = (b[1, 1] - b[1, 0]) / denom1
    return float(np.clip(p, 0.0, 1.0)), float(np.clip(q, 0.0, 1.0))


def solve_equilibrium(u0: PayoffMatrix, u1: PayoffMatrix) -> EquilibriumSolution:
    """
    Solve the bimatrix game (u0 for P0 on rows, u1 for P1 on columns).

    A unique pure equilibrium is returned as is. When two pure equilibria
    coexist the interior mixed one is returned. A player whose two actions pay
    the same against every opponent action makes the game Degenerate: that
    player mixes uniformly and the other best-responds.
    """
    a, b = u0.u, u1.u
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ContractViolation("payoff matrices must be finite")

    row_diff = a[0] - a[1]
    col_diff = b[:, 0] - b[:, 1]
    flat0 = bool(np.all(np.abs(row_diff) <= TIE_TOL))
    flat1 = bool(np.all(np.abs(col_diff) <= TIE_TOL))

    if flat0 or flat1:
        p = 0.5 if flat0 else None
        q = 0.5 if flat1 else None
        if p is None:
            p = _best_response(a @ np.array([q, 1.0 - q]))
        if q is None:
            q = _best_response(np.array([p, 1.0 - p]) @ b)
        logger.debug("Degenerate game (P0 flat=%s, P1 flat=%s)", flat0, flat1)
        return _solution(p, q, a, b, EquilibriumKind.DEGENERATE)

    pure = _pure_equilibria(a, b)
    if len(pure) == 1:
        j, k = pure[0]
        kind = (
            EquilibriumKind.PURE_DOMINANT
            if _strictly_dominant(row_diff) or _strictly_dominant(col_diff)
            else EquilibriumKind.PURE_BEST_RESPONSE
        )
        return _solution(1.0 - j, 1.0 - k, a, b, kind)

    interior = _interior(a, b)
    if interior is not None:
        candidate = _solution(*interior, a, b, EquilibriumKind.MIXED_INTERIOR)
        gains = deviation_gains(candidate.sigma0, candidate.sigma1, u0, u1)
        if max(gains) <= EQUILIBRIUM_TOL:
            return candidate

    if not pure:
        # Unreachable for finite non-degenerate 2x2 games
        raise ContractViolation("no equilibrium found for the given game")
    j, k = pure[0]
    return _solution(1.0 - j, 1.0 - k, a, b, EquilibriumKind.PURE_BEST_RESPONSE)


def decide(sigma: MixedStrategy) -> ActionLabel:
    """Most likely action; an exact tie resolves to Yield."""
    if abs(sigma.p - 0.5) <= TIE_TOL:
        return ActionLabel.YIELD
    return ActionLabel.NYIELD if sigma.p > 0.5 else ActionLabel.YIELD
