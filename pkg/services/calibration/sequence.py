"""
Turns a paired ego/ramp trajectory into a labelled interaction sequence.

The window starts at the first frame both vehicles share and ends where the
ramp vehicle commits to the lane change without having been overtaken.
"""
import logging
from dataclasses import dataclass

import numpy as np

from services.calibration.intent import detect_interaction_window, lane_change_probability
from services.calibration.labeling import jerk_magnitude, jerk_series, label_behavior
from services.config import CalibrationSettings, KinematicsSettings
from services.data.scene import RecordingMeta, Track
from services.errors import CalibrationError
from services.mapping.observation import EnvironmentObservation
from services.scenario.kinematics import ActionLabel, KinematicContext

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Timestep:
    frame: int
    ctx: KinematicContext
    obs: EnvironmentObservation
    label0: ActionLabel
    label1: ActionLabel


@dataclass(frozen=True)
class InteractionSequence:
    sequence_id: str
    ego_id: int
    other_id: int
    lead_id: int | None
    source: str
    timesteps: tuple[Timestep, ...]
    end_frame: int
    complete: bool
    dt: float

    def __post_init__(self):
        if len(self.timesteps) < 2:
            raise CalibrationError(f"sequence {self.sequence_id} needs at least 2 timesteps")
        frames = [t.frame for t in self.timesteps]
        if not frames[0] <= self.end_frame <= frames[-1]:
            raise CalibrationError(f"end frame {self.end_frame} outside {frames[0]}..{frames[-1]}")

    def __len__(self) -> int:
        return len(self.timesteps)

    @property
    def dynamic(self) -> bool:
        """Demonstrated behaviour changes at least once for either vehicle."""
        return (
            len({t.label0 for t in self.timesteps}) > 1
            or len({t.label1 for t in self.timesteps}) > 1
        )


def _aligned(track: Track, frames: np.ndarray) -> np.ndarray:
    return np.searchsorted(track.frames, frames)


def _gap_ahead(
    s1: np.ndarray, frames: np.ndarray, lead: Track | None, meta: RecordingMeta
) -> np.ndarray:
    candidates = []
    if meta.ramp_end_x is not None:
        candidates.append(meta.ramp_end_x * meta.x_direction - s1)
    if lead is not None:
        lead_gap = np.full(len(frames), np.nan)
        present = np.isin(frames, lead.frames)
        idx = _aligned(lead, frames[present])
        lead_gap[present] = lead.x[idx] * meta.x_direction - s1[present]
        candidates.append(lead_gap)
    if not candidates:
        raise CalibrationError("no lead vehicle and no ramp end position to measure the gap ahead")
    gap = np.fmin.reduce(candidates) if len(candidates) > 1 else candidates[0]
    missing = np.flatnonzero(np.isnan(gap))
    if len(missing):
        raise CalibrationError(
            f"frame {int(frames[missing[0]])} has neither a lead vehicle nor ramp geometry"
        )
    return np.maximum(gap, 0.0)


def _lane_change_series(
    other: Track, idx: np.ndarray, meta: RecordingMeta, cfg: CalibrationSettings
) -> np.ndarray:
    if other.lc_prob is not None:
        prob = other.lc_prob[idx]
        if np.all(np.isfinite(prob)):
            return prob

    ramp_lane = int(other.lane_id[idx[0]])
    if ramp_lane not in meta.ramp_lane_ids:
        ramp_lane = meta.ramp_lane_ids[0]
    center = meta.lane_center(ramp_lane)
    target = meta.lane_center(meta.target_lane_id)
    toward = 1.0 if target > center else -1.0
    lane_width = cfg.lane_width or meta.lane_width(ramp_lane)
    return lane_change_probability(
        (other.y[idx] - center) * toward,
        other.vy[idx] * toward,
        o_half=0.5 * lane_width,
        o_scale=cfg.o_scale,
        vy_scale=cfg.vy_scale,
    )


def calibrate_sequence(
    ego: Track,
    other: Track,
    lead: Track | None,
    meta: RecordingMeta,
    cfg: CalibrationSettings = CalibrationSettings(),
    kinematics: KinematicsSettings = KinematicsSettings(),
) -> InteractionSequence:
    """Build the labelled sequence for ego (P0) and the ramp vehicle (P1)."""
    frames = np.intersect1d(ego.frames, other.frames)
    if len(frames) < 2:
        raise CalibrationError(
            f"vehicles {ego.vehicle_id} and {other.vehicle_id} share {len(frames)} frames, need >= 2"
        )
    i0, i1 = _aligned(ego, frames), _aligned(other, frames)
    direction = meta.x_direction

    s0, s1 = ego.x[i0] * direction, other.x[i1] * direction
    v0 = np.maximum(ego.vx[i0] * direction, 0.0)
    v1 = np.maximum(other.vx[i1] * direction, 0.0)
    a0, a1 = ego.ax[i0] * direction, other.ax[i1] * direction
    gap = np.maximum(s1 - s0, 0.0)
    gap_ahead = _gap_ahead(s1, frames, lead, meta)
    lateral = np.abs(other.y[i1] - ego.y[i0])

    jerk0 = jerk_series(a0, meta.dt, cfg.smooth_window)
    jerk1 = jerk_series(a1, meta.dt, cfg.smooth_window)

    prob = _lane_change_series(other, i1, meta, cfg)
    overtaken = s0 > s1
    end, complete = detect_interaction_window(prob, overtaken)
    if end < 1:
        raise CalibrationError(
            f"interaction window of vehicle {other.vehicle_id} ends on its first shared frame"
        )

    timesteps = []
    for t in range(end + 1):
        ctx = KinematicContext(
            gap_init=float(gap[t]),
            gap_ahead=float(gap_ahead[t]),
            v0=float(v0[t]),
            v1=float(v1[t]),
            a0=float(a0[t]),
            a1=float(a1[t]),
            jerk0_mag=jerk_magnitude(jerk0[t], kinematics.jerk),
            jerk1_mag=jerk_magnitude(jerk1[t], kinematics.jerk),
            horizon=kinematics.horizon,
        )
        obs = EnvironmentObservation(
            d01_y=float(lateral[t]),
            dv01_x=float(v0[t] - v1[t]),
            d01_x=float(gap[t]),
            d_ahead=float(gap_ahead[t]),
            v1_x=float(v1[t]),
        )
        timesteps.append(Timestep(
            frame=int(frames[t]),
            ctx=ctx,
            obs=obs,
            label0=label_behavior(float(a0[t]), float(jerk0[t])),
            label1=label_behavior(float(a1[t]), float(jerk1[t])),
        ))

    return InteractionSequence(
        sequence_id=f"{meta.source}:{other.vehicle_id}",
        ego_id=ego.vehicle_id,
        other_id=other.vehicle_id,
        lead_id=None if lead is None else lead.vehicle_id,
        source=meta.source,
        timesteps=tuple(timesteps),
        end_frame=int(frames[end]),
        complete=complete,
        dt=meta.dt,
    )


def calibrate_scene(scene, pairs, cfg: CalibrationSettings, kinematics: KinematicsSettings) -> list[InteractionSequence]:
    """Calibrate every pair of a scene; unusable pairs are logged and skipped."""
    sequences = []
    for pair in pairs:
        lead = scene.tracks.get(pair.lead_id) if pair.lead_id is not None else None
        try:
            sequences.append(calibrate_sequence(
                scene.tracks[pair.ego_id], scene.tracks[pair.other_id], lead, scene.meta, cfg, kinematics,
            ))
        except CalibrationError as e:
            logger.warning("Skipping ramp vehicle %d: %s", pair.other_id, e)
    logger.info("Calibrated %d of %d pairs from %s", len(sequences), len(pairs), scene.meta.source)
    return sequences
