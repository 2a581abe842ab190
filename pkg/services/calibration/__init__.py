from .labeling import jerk_magnitude, jerk_series, label_behavior
from .intent import LANE_CHANGE_THRESHOLD, detect_interaction_window, lane_change_probability
from .sequence import InteractionSequence, Timestep, calibrate_scene, calibrate_sequence

__all__ = [
    'jerk_magnitude',
    'jerk_series',
    'label_behavior',
    'LANE_CHANGE_THRESHOLD',
    'detect_interaction_window',
    'lane_change_probability',
    'InteractionSequence',
    'Timestep',
    'calibrate_scene',
    'calibrate_sequence',
]
