"""
End-to-end offline experiment.

load -> pair -> calibrate -> optimize -> train (or load) mapping -> decide ->
evaluate, with every stage's failure re-raised as a StageError carrying the
stage name. Artifacts land in out_dir:

    sequences.jsonl   calibrated interaction sequences
    weights.jsonl     per-timestep recovered weights
    model.json        mapping model (when trained here)
    records.jsonl     adaptive decision records
    decisions.csv     plot-ready per-frame sigma values and labels
    report.json       EvalReport
"""
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from services import serialization
from services.calibration.sequence import InteractionSequence, calibrate_scene
from services.config import Settings
from services.data.pairing import extract_pairs
from services.data.scene import load_scene
from services.errors import MergeGameError, StageError
from services.evaluation.metrics import EvalReport, build_report, similarity_rate
from services.evaluation.records import DecisionRecord, decide_sequence, fixed_weight_baseline
from services.evaluation.replay import closed_loop_replay
from services.game.payoffs import WeightVector
from services.irl.batch import optimize_sequences
from services.mapping.model import train_mapping
from services.policy.policy_factory import PolicyFactory
from services.policy.policy_provider import DecisionPolicy
from tools.latency import StageTracker

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentConfig:
    recordings: tuple[tuple[Path, Path], ...]   # (tracks csv, meta json)
    out_dir: Path
    settings: Settings = field(default_factory=Settings)
    model_path: Path | None = None              # reuse a trained model instead of fitting one
    replay: bool = True


@contextmanager
def _stage(tracker: StageTracker, name: str):
    try:
        with tracker.measure(name):
            yield
    except StageError:
        raise
    except (MergeGameError, OSError, ValueError) as e:
        raise StageError(name, e) from e


def baseline_name(weights: tuple[float, float, float, float]) -> str:
    return "fixed[" + ",".join(f"{w:g}" for w in weights) + "]"


def decision_frame(records: list[DecisionRecord]) -> pd.DataFrame:
    return pd.DataFrame({
        "sequence_id": [r.sequence_id for r in records],
        "source": [r.source for r in records],
        "frame": [r.frame for r in records],
        "sigma0": [r.sigma0 for r in records],
        "sigma1": [r.sigma1 for r in records],
        "q0": [r.q0.value for r in records],
        "q1": [r.q1.value for r in records],
        "label0": [r.label0.value for r in records],
        "label1": [r.label1.value for r in records],
        "lambda0": [r.lambda0.w1 for r in records],
        "lambda1": [r.lambda1.w1 for r in records],
    })


def write_decisions_csv(path, records: list[DecisionRecord]):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    decision_frame(records).to_csv(path, index=False, float_format="%.6f")


def baseline_similarities(sequences: list[InteractionSequence], settings: Settings) -> dict[str, float]:
    out = {}
    for weights in settings.evaluation.baselines:
        lambda0, lambda1 = WeightVector(*weights[:2]), WeightVector(*weights[2:])
        records = [
            r
            for seq in sequences
            for r in fixed_weight_baseline(seq, lambda0, lambda1, settings.norms, settings.kinematics.a_bounds)
        ]
        out[baseline_name(weights)] = similarity_rate(records)
    return out


def replay_violations(sequences: list[InteractionSequence], policy: DecisionPolicy, settings: Settings) -> dict[str, int]:
    violations = {}
    for seq in sequences:
        if not seq.complete:
            continue
        result = closed_loop_replay(
            seq,
            policy,
            dt_sim=settings.evaluation.dt_sim,
            safety_gap=settings.evaluation.safety_gap,
            kinematics=settings.kinematics,
        )
        violations[seq.sequence_id] = result.violations
    return violations


def run_experiment(config: ExperimentConfig) -> EvalReport:
    settings = config.settings
    out_dir = Path(config.out_dir)
    tracker = StageTracker(out_dir.name or "experiment")

    with _stage(tracker, "load"):
        if not config.recordings:
            raise MergeGameError("no recordings given")
        scenes = [load_scene(tracks, meta) for tracks, meta in config.recordings]

    with _stage(tracker, "pair"):
        paired = [(scene, extract_pairs(scene)) for scene in scenes]
        logger.info("Found %d interaction pairs", sum(len(pairs) for _, pairs in paired))

    with _stage(tracker, "calibrate"):
        sequences = [
            seq
            for scene, pairs in paired
            for seq in calibrate_scene(scene, pairs, settings.calibration, settings.kinematics)
        ]
        if not sequences:
            raise StageError("calibrate", "no sequences after calibration")
        serialization.write_sequences(out_dir / "sequences.jsonl", sequences)

    if config.model_path is not None:
        with _stage(tracker, "train"):
            model = serialization.load_model(config.model_path)
    else:
        with _stage(tracker, "optimize"):
            samples = optimize_sequences(sequences, settings.norms, settings.irl, settings.kinematics.a_bounds)
            serialization.write_weight_samples(out_dir / "weights.jsonl", samples)
        with _stage(tracker, "train"):
            usable = [s for s in samples if s.converged or not settings.mapping.converged_only]
            model = train_mapping(
                [(s.obs, s.lambda0, s.lambda1) for s in usable],
                bins=settings.mapping.bins,
                variance_floor=settings.mapping.variance_floor,
            )
            serialization.save_model(out_dir / "model.json", model)

    with _stage(tracker, "decide"):
        policy = PolicyFactory.create_policy("adaptive", settings.norms, settings.kinematics.a_bounds, model=model)
        records = [r for seq in sequences for r in decide_sequence(seq, policy)]
        serialization.write_records(out_dir / "records.jsonl", records)
        write_decisions_csv(out_dir / "decisions.csv", records)

    with _stage(tracker, "evaluate"):
        baselines = baseline_similarities(sequences, settings)
        violations = replay_violations(sequences, policy, settings) if config.replay else None
        report = build_report(records, violations=violations, baselines=baselines)
        serialization.write_json(out_dir / "report.json", report.to_dict())

    logger.info(
        "Similarity %.2f%% over %d points, violation rate %.2f%%",
        report.similarity_percent, report.points, report.violation_rate_percent,
    )
    tracker.log_summary()
    return report
