"""
Synthetic highD-like recordings with planted, regime-dependent weights.

Every pair is simulated in its own frame window: a main-road vehicle (P0)
trailing a ramp vehicle (P1) in the target lane, optionally a lead vehicle
ahead of P1. At each frame the planted weights for the current environment
are fed to the game, with jerk magnitudes measured the way calibration
measures them, and the equilibrium decision drives each vehicle's
acceleration: Yield holds a gentle deceleration, NYield ramps acceleration up
with a positive jerk. Calibrating the written tracks therefore recovers the
planted decisions as labels.
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from services.calibration.labeling import jerk_magnitude
from services.data.scene import RecordingMeta, Scene, Track, save_scene
from services.game.equilibrium import decide
from services.game.payoffs import WeightVector
from services.mapping.adaptive import decide_with_weights
from services.mapping.observation import EnvironmentObservation
from services.scenario.kinematics import DEFAULT_JERK, ActionLabel, KinematicContext, NormalizationConstants

logger = logging.getLogger(__name__)

FRAME_RATE = 25.0
LANE_MARKINGS = (0.0, 3.75, 7.5, 11.25)
TARGET_LANE = 2
RAMP_LANE = 3
RAMP_END_X = 400.0
WINDOW = 1000           # frames reserved per pair
TIGHT_GAP = 26.0        # d01_x below this is the tight regime
YIELD_ACCEL = -0.3
NYIELD_START = 0.2
NYIELD_JERK = 0.3
LATERAL_SPEED = 0.8
DEFAULT_SOURCES = (("synthetic-a", 38), ("synthetic-b", 150))


def planted_weights(obs: EnvironmentObservation) -> tuple[WeightVector, WeightVector]:
    """Tight gaps make P0 weigh safety, open gaps efficiency."""
    lambda0 = WeightVector(0.9, 0.1) if obs.d01_x < TIGHT_GAP else WeightVector(0.3, 0.7)
    lambda1 = WeightVector(0.2, 0.8) if obs.d_ahead < 150.0 else WeightVector(0.6, 0.4)
    return lambda0, lambda1


@dataclass(frozen=True)
class PairSetup:
    gap: float
    v0: float
    v1: float
    lateral_start: int
    lead_gap: float | None


def draw_setup(rng: np.random.Generator) -> PairSetup:
    tight = rng.random() < 0.5
    if tight:
        gap = rng.uniform(12.0, 20.0)
        v0 = rng.uniform(29.0, 31.0)
        v1 = v0 - rng.uniform(-0.5, 1.5)
    else:
        gap = rng.uniform(32.0, 45.0)
        v0 = rng.uniform(27.0, 33.0)
        v1 = v0 - rng.uniform(0.5, 3.0)
    lead_gap = rng.uniform(40.0, 70.0) if rng.random() < 0.5 else None
    return PairSetup(gap, v0, v1, int(rng.integers(20, 41)), lead_gap)


def _next_accel(action: ActionLabel, previous: float, dt: float) -> float:
    if action is ActionLabel.YIELD:
        return YIELD_ACCEL
    return max(previous, NYIELD_START) + NYIELD_JERK * dt


def simulate_pair(setup: PairSetup, first_frame: int, first_id: int, norms: NormalizationConstants) -> list[Track]:
    dt = 1.0 / FRAME_RATE
    lane_center = {lane: 0.5 * (LANE_MARKINGS[lane - 1] + LANE_MARKINGS[lane]) for lane in (TARGET_LANE, RAMP_LANE)}
    # P1 reaches the lane marking this many frames after it starts moving sideways
    crossing = int(np.ceil((lane_center[RAMP_LANE] - LANE_MARKINGS[RAMP_LANE - 1]) / LATERAL_SPEED * FRAME_RATE))
    n = setup.lateral_start + crossing + 15

    x0, v0, a0 = 100.0 - setup.gap, setup.v0, 0.0
    x1, v1, a1 = 100.0, setup.v1, NYIELD_START
    prev_a0, prev_a1 = a0, a1
    lead_x = None if setup.lead_gap is None else 100.0 + setup.lead_gap
    lead_v = setup.v1 + 3.0
    columns = {name: np.zeros((3, n)) for name in ("x", "y", "vx", "vy", "ax")}
    lanes = np.zeros((3, n), dtype=int)

    for t in range(n):
        moving = t >= setup.lateral_start
        y1 = lane_center[RAMP_LANE] - (LATERAL_SPEED * (t - setup.lateral_start) * dt if moving else 0.0)
        vy1 = -LATERAL_SPEED if moving else 0.0

        gap = max(x1 - x0, 0.0)
        ahead = RAMP_END_X - x1 if lead_x is None else min(RAMP_END_X - x1, lead_x - x1)
        ctx = KinematicContext(
            gap, max(ahead, 0.0), v0, v1, a0, a1,
            jerk0_mag=jerk_magnitude((a0 - prev_a0) / dt, DEFAULT_JERK),
            jerk1_mag=jerk_magnitude((a1 - prev_a1) / dt, DEFAULT_JERK),
            horizon=1.0,
        )
        obs = EnvironmentObservation(
            d01_y=abs(y1 - lane_center[TARGET_LANE]),
            dv01_x=v0 - v1,
            d01_x=gap,
            d_ahead=max(ahead, 0.0),
            v1_x=v1,
        )
        lambda0, lambda1 = planted_weights(obs)
        prev_a0, prev_a1 = a0, a1
        solution = decide_with_weights(ctx, lambda0, lambda1, norms)
        a0 = _next_accel(decide(solution.sigma0), a0, dt)
        a1 = _next_accel(decide(solution.sigma1), a1, dt)

        columns["x"][:, t] = (x0, x1, np.nan if lead_x is None else lead_x)
        columns["y"][:, t] = (lane_center[TARGET_LANE], y1, lane_center[TARGET_LANE])
        columns["vx"][:, t] = (v0, v1, lead_v)
        columns["vy"][:, t] = (0.0, vy1, 0.0)
        columns["ax"][:, t] = (a0, a1, 0.0)
        lanes[:, t] = (TARGET_LANE, RAMP_LANE if y1 > LANE_MARKINGS[RAMP_LANE - 1] else TARGET_LANE, TARGET_LANE)

        x0 += v0 * dt + 0.5 * a0 * dt ** 2
        v0 = max(v0 + a0 * dt, 0.0)
        x1 += v1 * dt + 0.5 * a1 * dt ** 2
        v1 = max(v1 + a1 * dt, 0.0)
        if lead_x is not None:
            lead_x += lead_v * dt

    frames = np.arange(first_frame, first_frame + n)
    tracks = []
    for row in range(2 if lead_x is None else 3):
        tracks.append(Track(
            vehicle_id=first_id + row,
            frames=frames,
            x=columns["x"][row],
            y=columns["y"][row],
            vx=columns["vx"][row],
            vy=columns["vy"][row],
            ax=columns["ax"][row],
            ay=np.zeros(n),
            lane_id=lanes[row],
        ))
    return tracks


def synthetic_scene(
    n_pairs: int,
    rng: np.random.Generator,
    source: str = "synthetic",
    norms: NormalizationConstants = NormalizationConstants(),
) -> Scene:
    meta = RecordingMeta(
        frame_rate=FRAME_RATE,
        lane_markings=LANE_MARKINGS,
        ramp_lane_ids=(RAMP_LANE,),
        target_lane_id=TARGET_LANE,
        ramp_end_x=RAMP_END_X,
        x_direction=1,
        source=source,
    )
    tracks = {}
    for k in range(n_pairs):
        for track in simulate_pair(draw_setup(rng), k * WINDOW + 1, 3 * k + 1, norms):
            tracks[track.vehicle_id] = track
    return Scene(meta=meta, tracks=tracks)


def generate_suite(
    seed: int = 0,
    sources: tuple[tuple[str, int], ...] = DEFAULT_SOURCES,
    norms: NormalizationConstants = NormalizationConstants(),
) -> list[Scene]:
    """One scene per source; 38 + 150 pairs by default."""
    rng = np.random.default_rng(seed)
    return [synthetic_scene(n, rng, source, norms) for source, n in sources]


def write_suite(out_dir, scenes: list[Scene]) -> list[tuple[Path, Path]]:
    out_dir = Path(out_dir)
    paths = []
    for scene in scenes:
        tracks_path = out_dir / f"{scene.meta.source}_tracks.csv"
        meta_path = out_dir / f"{scene.meta.source}_meta.json"
        save_scene(scene, tracks_path, meta_path)
        paths.append((tracks_path, meta_path))
        logger.info("Wrote %s with %d tracks", tracks_path, len(scene.tracks))
    return paths
