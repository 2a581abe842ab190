"""
highD-like recording reader.

A recording is a tracks CSV (one row per vehicle and frame) plus a JSON meta
file describing the road: frame rate, lateral lane markings, which lanes are
ramp lanes and which main-road lane they merge into.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np
import pandas as pd

from services.errors import DataFormatError

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = (
    "frame", "id", "x", "y",
    "xVelocity", "yVelocity", "xAcceleration", "yAcceleration", "laneId",
)
OPTIONAL_COLUMNS = ("lcProb",)


@dataclass(frozen=True)
class RecordingMeta:
    frame_rate: float
    lane_markings: tuple[float, ...]
    ramp_lane_ids: tuple[int, ...]
    target_lane_id: int
    ramp_end_x: float | None = None
    x_direction: int = 1
    source: str = "recording"

    def __post_init__(self):
        if not (math.isfinite(self.frame_rate) and self.frame_rate > 0):
            raise DataFormatError(f"frame_rate must be > 0, got {self.frame_rate}")
        markings = tuple(float(m) for m in self.lane_markings)
        if len(markings) < 2 or any(b <= a for a, b in zip(markings, markings[1:])):
            raise DataFormatError("lane_markings must hold at least two strictly increasing values")
        if self.x_direction not in (1, -1):
            raise DataFormatError(f"x_direction must be 1 or -1, got {self.x_direction}")
        object.__setattr__(self, "lane_markings", markings)
        object.__setattr__(self, "ramp_lane_ids", tuple(int(i) for i in self.ramp_lane_ids))
        for lane in (*self.ramp_lane_ids, self.target_lane_id):
            if not self.has_lane(lane):
                raise DataFormatError(f"lane {lane} is not bounded by the lane markings")

    @property
    def dt(self) -> float:
        return 1.0 / self.frame_rate

    def has_lane(self, lane_id: int) -> bool:
        # Lane k lies between markings k-1 and k
        return 1 <= lane_id < len(self.lane_markings)

    def lane_bounds(self, lane_id: int) -> tuple[float, float]:
        return self.lane_markings[lane_id - 1], self.lane_markings[lane_id]

    def lane_center(self, lane_id: int) -> float:
        low, high = self.lane_bounds(lane_id)
        return 0.5 * (low + high)

    def lane_width(self, lane_id: int) -> float:
        low, high = self.lane_bounds(lane_id)
        return high - low

    def to_dict(self) -> dict:
        return {
            "frame_rate": self.frame_rate,
            "lane_markings": list(self.lane_markings),
            "ramp_lane_ids": list(self.ramp_lane_ids),
            "target_lane_id": self.target_lane_id,
            "ramp_end_x": self.ramp_end_x,
            "x_direction": self.x_direction,
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, data: dict, source: str | None = None) -> "RecordingMeta":
        required = ("frame_rate", "lane_markings", "ramp_lane_ids", "target_lane_id")
        for key in required:
            if key not in data:
                raise DataFormatError(f"meta file is missing '{key}'", column=key)
        return cls(
            frame_rate=float(data["frame_rate"]),
            lane_markings=tuple(data["lane_markings"]),
            ramp_lane_ids=tuple(data["ramp_lane_ids"]),
            target_lane_id=int(data["target_lane_id"]),
            ramp_end_x=None if data.get("ramp_end_x") is None else float(data["ramp_end_x"]),
            x_direction=int(data.get("x_direction", 1)),
            source=str(data.get("source") or source or "recording"),
        )


@dataclass(frozen=True)
class TrackPoint:
    frame: int
    x: float
    y: float
    vx: float
    vy: float
    ax: float
    ay: float
    lane_id: int
    lc_prob: float | None = None


@dataclass(frozen=True, eq=False)
class Track:
    """One vehicle's samples as column arrays, ordered by frame."""
    vehicle_id: int
    frames: np.ndarray
    x: np.ndarray
    y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    ax: np.ndarray
    ay: np.ndarray
    lane_id: np.ndarray
    lc_prob: np.ndarray | None = None

    def __post_init__(self):
        if len(self.frames) and np.any(np.diff(self.frames) <= 0):
            raise DataFormatError(f"frames of vehicle {self.vehicle_id} are not strictly increasing")

    def __len__(self) -> int:
        return len(self.frames)

    def points(self) -> Iterator[TrackPoint]:
        for i in range(len(self.frames)):
            yield TrackPoint(
                frame=int(self.frames[i]),
                x=float(self.x[i]), y=float(self.y[i]),
                vx=float(self.vx[i]), vy=float(self.vy[i]),
                ax=float(self.ax[i]), ay=float(self.ay[i]),
                lane_id=int(self.lane_id[i]),
                lc_prob=None if self.lc_prob is None else float(self.lc_prob[i]),
            )

    def index_of(self, frame: int) -> int | None:
        i = int(np.searchsorted(self.frames, frame))
        if i < len(self.frames) and self.frames[i] == frame:
            return i
        return None

    def equals(self, other: "Track") -> bool:
        columns = ("frames", "x", "y", "vx", "vy", "ax", "ay", "lane_id")
        if self.vehicle_id != other.vehicle_id:
            return False
        if not all(np.array_equal(getattr(self, c), getattr(other, c)) for c in columns):
            return False
        if (self.lc_prob is None) != (other.lc_prob is None):
            return False
        return self.lc_prob is None or np.array_equal(self.lc_prob, other.lc_prob, equal_nan=True)


@dataclass(frozen=True, eq=False)
class Scene:
    meta: RecordingMeta
    tracks: dict[int, Track] = field(default_factory=dict)

    def equals(self, other: "Scene") -> bool:
        return (
            self.meta == other.meta
            and sorted(self.tracks) == sorted(other.tracks)
            and all(self.tracks[i].equals(other.tracks[i]) for i in self.tracks)
        )


def load_meta(meta_path) -> RecordingMeta:
    path = Path(meta_path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataFormatError(f"meta file {path} is not valid JSON: {e}") from e
    return RecordingMeta.from_dict(data, source=path.stem)


def _read_tracks_frame(tracks_path) -> pd.DataFrame:
    try:
        df = pd.read_csv(tracks_path, encoding="utf-8", dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as e:
        raise DataFormatError(f"tracks file {tracks_path} is empty") from e
    if df.empty:
        raise DataFormatError(f"tracks file {tracks_path} has no data rows")
    for column in REQUIRED_COLUMNS:
        if column not in df.columns:
            raise DataFormatError(f"missing column {column}", column=column)

    columns = [c for c in (*REQUIRED_COLUMNS, *OPTIONAL_COLUMNS) if c in df.columns]
    out = pd.DataFrame(index=df.index)
    for column in columns:
        raw = df[column].str.strip()
        values = pd.to_numeric(raw, errors="coerce")
        allow_blank = column in OPTIONAL_COLUMNS
        bad = values.isna() & ~(allow_blank & (raw == ""))
        if bad.any():
            row = int(bad.idxmax()) + 2  # 1-based file line, header included
            raise DataFormatError(
                f"non-numeric value '{df.at[bad.idxmax(), column]}' in column {column} at row {row}",
                column=column, row=row,
            )
        infinite = np.isinf(values)
        if infinite.any():
            row = int(infinite.idxmax()) + 2
            raise DataFormatError(
                f"non-finite value '{df.at[infinite.idxmax(), column]}' in column {column} at row {row}",
                column=column, row=row,
            )
        out[column] = values
    return out


def load_scene(tracks_path, meta_path) -> Scene:
    meta = load_meta(meta_path)
    df = _read_tracks_frame(tracks_path)

    duplicated = df.duplicated(subset=["id", "frame"], keep=False)
    if duplicated.any():
        row = int(duplicated.idxmax()) + 2
        raise DataFormatError(f"duplicate (id, frame) at row {row}", row=row)

    df = df.sort_values(["id", "frame"], kind="mergesort").reset_index(drop=True)
    has_prob = "lcProb" in df.columns
    tracks = {}
    for vehicle_id, group in df.groupby("id", sort=True):
        lanes = group["laneId"].to_numpy(dtype=int)
        unknown = [int(lane) for lane in np.unique(lanes) if not meta.has_lane(int(lane))]
        if unknown:
            raise DataFormatError(f"vehicle {int(vehicle_id)} uses lane ids {unknown} unknown to the meta file")
        tracks[int(vehicle_id)] = Track(
            vehicle_id=int(vehicle_id),
            frames=group["frame"].to_numpy(dtype=int),
            x=group["x"].to_numpy(dtype=float),
            y=group["y"].to_numpy(dtype=float),
            vx=group["xVelocity"].to_numpy(dtype=float),
            vy=group["yVelocity"].to_numpy(dtype=float),
            ax=group["xAcceleration"].to_numpy(dtype=float),
            ay=group["yAcceleration"].to_numpy(dtype=float),
            lane_id=lanes,
            lc_prob=group["lcProb"].to_numpy(dtype=float) if has_prob else None,
        )
    logger.info("Loaded %d tracks from %s (%s)", len(tracks), tracks_path, meta.source)
    return Scene(meta=meta, tracks=tracks)


def scene_to_frame(scene: Scene) -> pd.DataFrame:
    parts = []
    for vehicle_id in sorted(scene.tracks):
        track = scene.tracks[vehicle_id]
        part = pd.DataFrame({
            "frame": track.frames,
            "id": vehicle_id,
            "x": track.x,
            "y": track.y,
            "xVelocity": track.vx,
            "yVelocity": track.vy,
            "xAcceleration": track.ax,
            "yAcceleration": track.ay,
            "laneId": track.lane_id,
        })
        if track.lc_prob is not None:
            part["lcProb"] = track.lc_prob
        parts.append(part)
    return pd.concat(parts, ignore_index=True)


def save_scene(scene: Scene, tracks_path, meta_path):
    Path(tracks_path).parent.mkdir(parents=True, exist_ok=True)
    scene_to_frame(scene).to_csv(tracks_path, index=False, float_format="%.17g")
    Path(meta_path).write_text(json.dumps(scene.meta.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
