from .scene import (
    OPTIONAL_COLUMNS,
    REQUIRED_COLUMNS,
    RecordingMeta,
    Scene,
    Track,
    TrackPoint,
    load_meta,
    load_scene,
    save_scene,
    scene_to_frame,
)
from .pairing import InteractionPair, PairingReport, extract_pairs, find_pairs, merge_approach_frame

__all__ = [
    'OPTIONAL_COLUMNS',
    'REQUIRED_COLUMNS',
    'RecordingMeta',
    'Scene',
    'Track',
    'TrackPoint',
    'load_meta',
    'load_scene',
    'save_scene',
    'scene_to_frame',
    'InteractionPair',
    'PairingReport',
    'extract_pairs',
    'find_pairs',
    'merge_approach_frame',
]
