"""
JSON / JSON Lines codecs for sequences, weight samples, mapping models and
decision records. Output uses sorted keys and rejects NaN so identical inputs
give identical bytes.
"""
import json
from dataclasses import asdict
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from services.calibration.sequence import InteractionSequence, Timestep
from services.errors import DataFormatError
from services.evaluation.records import DecisionRecord
from services.game.payoffs import WeightVector
from services.irl.batch import WeightSample
from services.mapping.model import LatentEmissions, MappingModel
from services.mapping.observation import EnvironmentObservation
from services.scenario.kinematics import ActionLabel, KinematicContext

FORMAT_VERSION = 1


def dumps(document: dict, indent: int | None = None) -> str:
    return json.dumps(document, sort_keys=True, allow_nan=False, indent=indent)


def write_json(path, document: dict):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps({"format_version": FORMAT_VERSION, **document}, indent=2) + "\n", encoding="utf-8")


def read_json(path) -> dict:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataFormatError(f"{path} is not valid JSON: {e}") from e
    _check_version(document, path)
    return document


def write_jsonl(path, documents: Iterable[dict]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as f:
        for document in documents:
            f.write(dumps({"format_version": FORMAT_VERSION, **document}) + "\n")
            count += 1
    return count


def read_jsonl(path) -> Iterator[dict]:
    with Path(path).open("r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                document = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataFormatError(f"{path}:{line_number} is not valid JSON: {e}", row=line_number) from e
            _check_version(document, f"{path}:{line_number}")
            yield document


def _check_version(document, where):
    if not isinstance(document, dict):
        raise DataFormatError(f"{where}: expected a JSON object")
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise DataFormatError(f"{where}: unsupported format_version {version!r}")


# -- sequences ---------------------------------------------------------------

def sequence_to_dict(seq: InteractionSequence) -> dict:
    return {
        "sequence_id": seq.sequence_id,
        "ego_id": seq.ego_id,
        "other_id": seq.other_id,
        "lead_id": seq.lead_id,
        "source": seq.source,
        "end_frame": seq.end_frame,
        "complete": seq.complete,
        "dt": seq.dt,
        "timesteps": [
            {
                "frame": t.frame,
                "ctx": asdict(t.ctx),
                "obs": asdict(t.obs),
                "label0": t.label0.value,
                "label1": t.label1.value,
            }
            for t in seq.timesteps
        ],
    }


def sequence_from_dict(data: dict) -> InteractionSequence:
    try:
        timesteps = tuple(
            Timestep(
                frame=int(t["frame"]),
                ctx=KinematicContext(**t["ctx"]),
                obs=EnvironmentObservation(**t["obs"]),
                label0=ActionLabel(t["label0"]),
                label1=ActionLabel(t["label1"]),
            )
            for t in data["timesteps"]
        )
        return InteractionSequence(
            sequence_id=data["sequence_id"],
            ego_id=int(data["ego_id"]),
            other_id=int(data["other_id"]),
            lead_id=None if data.get("lead_id") is None else int(data["lead_id"]),
            source=data["source"],
            timesteps=timesteps,
            end_frame=int(data["end_frame"]),
            complete=bool(data["complete"]),
            dt=float(data["dt"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise DataFormatError(f"malformed sequence record: {e}") from e


def write_sequences(path, sequences: Iterable[InteractionSequence]) -> int:
    return write_jsonl(path, (sequence_to_dict(s) for s in sequences))


def read_sequences(path) -> list[InteractionSequence]:
    return [sequence_from_dict(d) for d in read_jsonl(path)]


# -- weight samples ------------------------------------------------------------

def weight_sample_to_dict(sample: WeightSample) -> dict:
    return {
        "sequence_id": sample.sequence_id,
        "frame": sample.frame,
        "obs": asdict(sample.obs),
        "lambda0": [sample.lambda0.w1, sample.lambda0.w2],
        "lambda1": [sample.lambda1.w1, sample.lambda1.w2],
        "iterations": sample.iterations,
        "converged": sample.converged,
        "reconstructed": sample.reconstructed,
    }


def weight_sample_from_dict(data: dict) -> tuple[EnvironmentObservation, WeightVector, WeightVector]:
    try:
        return (
            EnvironmentObservation(**data["obs"]),
            WeightVector(*data["lambda0"]),
            WeightVector(*data["lambda1"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise DataFormatError(f"malformed weight sample: {e}") from e


# -- mapping model -------------------------------------------------------------

def model_to_dict(model: MappingModel) -> dict:
    return {
        "bins": model.bins,
        "bin_centers": model.bin_centers.tolist(),
        "variance_floor": model.variance_floor,
        "samples": model.samples,
        "standardization": {"mean": model.obs_mean.tolist(), "std": model.obs_std.tolist()},
        "latents": {
            name: {
                "dims": list(latent.dims),
                "priors": latent.priors.tolist(),
                "means": latent.means.tolist(),
                "variances": latent.variances.tolist(),
            }
            for name, latent in model.latents.items()
        },
    }


def model_from_dict(data: dict) -> MappingModel:
    try:
        latents = {
            name: LatentEmissions(
                dims=tuple(latent["dims"]),
                priors=np.array(latent["priors"], dtype=float),
                means=np.array(latent["means"], dtype=float),
                variances=np.array(latent["variances"], dtype=float),
            )
            for name, latent in data["latents"].items()
        }
        return MappingModel(
            bins=int(data["bins"]),
            bin_centers=np.array(data["bin_centers"], dtype=float),
            obs_mean=np.array(data["standardization"]["mean"], dtype=float),
            obs_std=np.array(data["standardization"]["std"], dtype=float),
            latents=latents,
            variance_floor=float(data["variance_floor"]),
            samples=int(data.get("samples", 0)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise DataFormatError(f"malformed mapping model: {e}") from e


def save_model(path, model: MappingModel):
    write_json(path, model_to_dict(model))


def load_model(path) -> MappingModel:
    return model_from_dict(read_json(path))


def write_weight_samples(path, samples: Iterable[WeightSample]) -> int:
    return write_jsonl(path, (weight_sample_to_dict(s) for s in samples))


def read_weight_samples(path, converged_only: bool = False) -> list[tuple[EnvironmentObservation, WeightVector, WeightVector]]:
    return [
        weight_sample_from_dict(d)
        for d in read_jsonl(path)
        if not converged_only or d.get("converged", False)
    ]


# -- decision records ----------------------------------------------------------

def record_to_dict(record: DecisionRecord) -> dict:
    return {
        "sequence_id": record.sequence_id,
        "source": record.source,
        "frame": record.frame,
        "sigma0": record.sigma0,
        "sigma1": record.sigma1,
        "q0": record.q0.value,
        "q1": record.q1.value,
        "label0": record.label0.value,
        "label1": record.label1.value,
        "lambda0": [record.lambda0.w1, record.lambda0.w2],
        "lambda1": [record.lambda1.w1, record.lambda1.w2],
        "degenerate": record.degenerate,
    }


def record_from_dict(data: dict) -> DecisionRecord:
    try:
        return DecisionRecord(
            sequence_id=data["sequence_id"],
            source=data["source"],
            frame=int(data["frame"]),
            sigma0=float(data["sigma0"]),
            sigma1=float(data["sigma1"]),
            q0=ActionLabel(data["q0"]),
            q1=ActionLabel(data["q1"]),
            label0=ActionLabel(data["label0"]),
            label1=ActionLabel(data["label1"]),
            lambda0=WeightVector(*data["lambda0"]),
            lambda1=WeightVector(*data["lambda1"]),
            degenerate=bool(data["degenerate"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise DataFormatError(f"malformed decision record: {e}") from e


def write_records(path, records: Iterable[DecisionRecord]) -> int:
    return write_jsonl(path, (record_to_dict(r) for r in records))


def read_records(path) -> list[DecisionRecord]:
    return [record_from_dict(d) for d in read_jsonl(path)]
