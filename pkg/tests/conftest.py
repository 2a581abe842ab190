import numpy as np
import pytest

from services.calibration.sequence import InteractionSequence, Timestep
from services.data.scene import RecordingMeta, Scene, Track
from services.mapping.observation import EnvironmentObservation
from services.scenario.kinematics import ActionLabel, KinematicContext, NormalizationConstants


@pytest.fixture
def norms():
    return NormalizationConstants()


@pytest.fixture
def example_ctx():
    return KinematicContext(gap_init=20.0, gap_ahead=80.0, v0=30.0, v1=25.0)


@pytest.fixture
def meta():
    return RecordingMeta(
        frame_rate=25.0,
        lane_markings=(0.0, 3.75, 7.5, 11.25),
        ramp_lane_ids=(3,),
        target_lane_id=2,
        ramp_end_x=400.0,
        source="fixture",
    )


def make_track(vehicle_id, frames, x, y, vx, ax, lane_id, vy=0.0, lc_prob=None):
    n = len(frames)

    def column(value):
        return np.broadcast_to(np.asarray(value, dtype=float), (n,)).copy()

    return Track(
        vehicle_id=vehicle_id,
        frames=np.asarray(frames, dtype=int),
        x=column(x),
        y=column(y),
        vx=column(vx),
        vy=column(vy),
        ax=column(ax),
        ay=np.zeros(n),
        lane_id=np.broadcast_to(np.asarray(lane_id, dtype=int), (n,)).copy(),
        lc_prob=None if lc_prob is None else column(lc_prob),
    )


@pytest.fixture
def merge_scene(meta):
    """Ramp vehicle 2 drifting into lane 2 between trailing ego 1 and leader 3."""
    frames = np.arange(1, 101)
    t = (frames - 1) / meta.frame_rate
    ramp_y = np.where(frames < 50, 9.375, 9.375 - 0.8 * (frames - 50) / meta.frame_rate)
    ramp_vy = np.where(frames < 50, 0.0, -0.8)
    ramp_lane = np.where(ramp_y > 7.5, 3, 2)
    tracks = {
        1: make_track(1, frames, 80.0 + 28.0 * t, 5.625, 28.0, 0.0, 2),
        2: make_track(2, frames, 100.0 + 27.0 * t, ramp_y, 27.0, 0.0, ramp_lane, vy=ramp_vy),
        3: make_track(3, frames, 150.0 + 30.0 * t, 5.625, 30.0, 0.0, 2),
    }
    return Scene(meta=meta, tracks=tracks)


def make_sequence(contexts, labels=None, sequence_id="fixture:1", source="fixture", dt=0.04, complete=True):
    """Sequence over the given contexts with observations derived from them."""
    labels = labels or [(ActionLabel.YIELD, ActionLabel.NYIELD)] * len(contexts)
    timesteps = tuple(
        Timestep(
            frame=i + 1,
            ctx=ctx,
            obs=EnvironmentObservation(
                d01_y=3.0, dv01_x=ctx.v0 - ctx.v1, d01_x=ctx.gap_init, d_ahead=ctx.gap_ahead, v1_x=ctx.v1,
            ),
            label0=label0,
            label1=label1,
        )
        for i, (ctx, (label0, label1)) in enumerate(zip(contexts, labels))
    )
    return InteractionSequence(
        sequence_id=sequence_id,
        ego_id=1,
        other_id=2,
        lead_id=None,
        source=source,
        timesteps=timesteps,
        end_frame=len(contexts),
        complete=complete,
        dt=dt,
    )
