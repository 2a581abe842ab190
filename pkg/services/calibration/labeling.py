import numpy as np
from scipy.ndimage import uniform_filter1d

from services.errors import CalibrationError, ContractViolation
from services.scenario.kinematics import ActionLabel


def label_behavior(ax: float, jerk: float) -> ActionLabel:
    """
    Demonstrated action from longitudinal acceleration and jerk.

    Negative acceleration is Yield. Otherwise (zero included) a positive jerk
    is NYield and anything else Yield.
    """
    if ax < 0:
        return ActionLabel.YIELD
    return ActionLabel.NYIELD if jerk > 0 else ActionLabel.YIELD


def jerk_series(ax_series, dt: float, smooth_window: int = 5) -> np.ndarray:
    """
    Jerk per frame: moving-average smoothing of ax (window <= 1 disables it),
    then central differences inside and one-sided differences at both ends.
    """
    ax = np.asarray(ax_series, dtype=float)
    if ax.ndim != 1 or len(ax) < 2:
        raise CalibrationError("need at least 2 acceleration samples to derive jerk")
    if dt <= 0:
        raise ContractViolation(f"dt must be > 0, got {dt}")
    if smooth_window and smooth_window > 1:
        ax = uniform_filter1d(ax, size=int(smooth_window), mode="nearest")
    return np.gradient(ax, dt)


# Below this the smoothed signal is treated as flat
JERK_SIGNAL_EPS = 1e-6


def jerk_magnitude(jerk: float, default: float) -> float:
    """Measured |jerk|, or default when the signal is missing or flat."""
    magnitude = abs(float(jerk))
    if not np.isfinite(magnitude) or magnitude < JERK_SIGNAL_EPS:
        return default
    return magnitude
