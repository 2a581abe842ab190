import logging
from dataclasses import dataclass, field

import numpy as np

from services.data.scene import Scene, Track

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InteractionPair:
    ego_id: int         # P0, main-road vehicle behind the merger
    other_id: int       # P1, ramp vehicle
    lead_id: int | None
    overlap: int        # shared frames of ego and other
    merge_frame: int


@dataclass
class PairingReport:
    pairs: list[InteractionPair] = field(default_factory=list)
    # ramp vehicle id -> reason it was skipped
    skipped: dict[int, str] = field(default_factory=dict)


def merge_approach_frame(track: Track, ramp_lanes: tuple[int, ...]) -> int:
    """Last frame of the ramp vehicle before it leaves the ramp lanes."""
    on_ramp = np.isin(track.lane_id, ramp_lanes)
    left = np.flatnonzero(~on_ramp)
    last = (left[0] - 1) if len(left) else len(track) - 1
    return int(track.frames[max(int(last), 0)])


def find_pairs(scene: Scene) -> PairingReport:
    """
    Pair every ramp vehicle with the nearest main-road vehicle behind it in
    the target lane, taken at the merge-approach frame.
    """
    meta = scene.meta
    direction = meta.x_direction
    report = PairingReport()

    for ramp_id in sorted(scene.tracks):
        ramp = scene.tracks[ramp_id]
        if len(ramp) == 0 or int(ramp.lane_id[0]) not in meta.ramp_lane_ids:
            continue
        frame = merge_approach_frame(ramp, meta.ramp_lane_ids)
        s_ramp = ramp.x[ramp.index_of(frame)] * direction

        behind, ahead = [], []
        for vehicle_id in sorted(scene.tracks):
            if vehicle_id == ramp_id:
                continue
            track = scene.tracks[vehicle_id]
            i = track.index_of(frame)
            if i is None or int(track.lane_id[i]) != meta.target_lane_id:
                continue
            offset = track.x[i] * direction - s_ramp
            if offset < 0:
                behind.append((-offset, vehicle_id))
            elif offset > 0:
                ahead.append((offset, vehicle_id))

        if not behind:
            report.skipped[ramp_id] = "no main-road vehicle behind in the target lane"
            continue
        _, ego_id = min(behind)
        overlap = len(np.intersect1d(scene.tracks[ego_id].frames, ramp.frames))
        if overlap < 2:
            report.skipped[ramp_id] = f"only {overlap} overlapping frames with vehicle {ego_id}"
            continue
        lead_id = min(ahead)[1] if ahead else None
        report.pairs.append(InteractionPair(ego_id, ramp_id, lead_id, overlap, frame))

    logger.info(
        "Paired %d ramp vehicles in %s, skipped %d", len(report.pairs), meta.source, len(report.skipped)
    )
    for ramp_id, reason in report.skipped.items():
        logger.debug("Skipped ramp vehicle %d: %s", ramp_id, reason)
    return report


def extract_pairs(scene: Scene) -> list[InteractionPair]:
    return find_pairs(scene).pairs
