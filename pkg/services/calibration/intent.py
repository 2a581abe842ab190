"""
Lane-change intent and interaction-window end detection.

The probability comes from a logistic heuristic on the ramp vehicle's lateral
offset toward the target lane and its lateral speed, unless the recording
carries a precomputed lcProb column.
"""
import numpy as np
from scipy.special import expit

from services.errors import CalibrationError, ContractViolation

LANE_CHANGE_THRESHOLD = 0.5


def lane_change_probability(
    lateral_offset_toward_target,
    vy_toward_target,
    o_half: float,
    o_scale: float = 0.3,
    vy_scale: float = 0.2,
):
    """
    logistic((offset - o_half) / o_scale + vy / vy_scale).

    o_half is the offset at which a vehicle with no lateral speed counts as
    50% committed, normally half the ramp lane width (the lane marking).
    Works elementwise on arrays.
    """
    if o_scale <= 0 or vy_scale <= 0:
        raise ContractViolation("o_scale and vy_scale must be > 0")
    offset = np.asarray(lateral_offset_toward_target, dtype=float)
    vy = np.asarray(vy_toward_target, dtype=float)
    prob = expit((offset - o_half) / o_scale + vy / vy_scale)
    return float(prob) if np.ndim(prob) == 0 else prob


def detect_interaction_window(prob_series, overtaken=None) -> tuple[int, bool]:
    """
    Index of the first frame whose lane-change probability exceeds 0.5 while
    the ramp vehicle is not overtaken. Falls back to the last index with
    complete=False.
    """
    prob = np.asarray(prob_series, dtype=float)
    if prob.ndim != 1 or len(prob) == 0:
        raise CalibrationError("lane-change probability series is empty")
    blocked = np.zeros(len(prob), dtype=bool) if overtaken is None else np.asarray(overtaken, dtype=bool)
    if blocked.shape != prob.shape:
        raise ContractViolation("overtaken flags must match the probability series")

    hits = np.flatnonzero((prob > LANE_CHANGE_THRESHOLD) & ~blocked)
    if len(hits):
        return int(hits[0]), True
    return len(prob) - 1, False
