import numpy as np
import pytest

from services.config import Settings
from services.data.pairing import extract_pairs
from services.data.scene import Scene, save_scene
from services.errors import StageError
from services.evaluation.experiment import ExperimentConfig, run_experiment
from services.evaluation.replay import closed_loop_replay
from services.policy.policy_factory import PolicyFactory
from services.serialization import load_model, read_records, read_sequences
from tests.conftest import make_track
from tools.synthetic import generate_suite, write_suite


@pytest.fixture(scope="module")
def acceptance_run(tmp_path_factory):
    data_dir = tmp_path_factory.mktemp("synthetic")
    recordings = write_suite(data_dir, generate_suite(seed=0))
    out_dir = tmp_path_factory.mktemp("run")
    report = run_experiment(ExperimentConfig(recordings=tuple(recordings), out_dir=out_dir))
    return report, out_dir


def test_suite_has_188_pairs_by_default():
    scenes = generate_suite(seed=0)
    assert sum(len(extract_pairs(scene)) for scene in scenes) == 188
    assert [scene.meta.source for scene in scenes] == ["synthetic-a", "synthetic-b"]


def test_generator_is_seeded():
    first, second = generate_suite(seed=4, sources=(("s", 5),)), generate_suite(seed=4, sources=(("s", 5),))
    assert first[0].equals(second[0])
    other = generate_suite(seed=5, sources=(("s", 5),))
    assert not first[0].equals(other[0])


def test_pipeline_reaches_human_like_similarity(acceptance_run):
    report, out_dir = acceptance_run
    assert report.sequences == 188
    assert report.similarity >= 0.75
    assert report.matches <= report.points
    assert report.similarity == pytest.approx(report.matches / report.points)
    assert set(report.per_source) == {"synthetic-a", "synthetic-b"}
    assert len(report.baselines) == 2
    for name in ("report.json", "records.jsonl", "decisions.csv", "sequences.jsonl", "weights.jsonl", "model.json"):
        assert (out_dir / name).is_file()
    assert len(read_records(out_dir / "records.jsonl")) * 2 == report.points


def test_pipeline_replay_is_safe(acceptance_run):
    report, _ = acceptance_run
    assert report.violations == 0
    assert report.violation_rate_percent == 0.0


def test_adaptive_replay_over_safety_fixtures(acceptance_run):
    _, out_dir = acceptance_run
    settings = Settings()
    policy = PolicyFactory.create_policy("adaptive", settings.norms, model=load_model(out_dir / "model.json"))
    fixtures = read_sequences(out_dir / "sequences.jsonl")[:50]
    assert len(fixtures) == 50
    assert sum(closed_loop_replay(seq, policy, safety_gap=0.0).violations for seq in fixtures) == 0


def test_small_run_is_byte_identical(tmp_path):
    recordings = tuple(write_suite(tmp_path / "data", generate_suite(seed=1, sources=(("small", 12),))))
    run_experiment(ExperimentConfig(recordings=recordings, out_dir=tmp_path / "a"))
    run_experiment(ExperimentConfig(recordings=recordings, out_dir=tmp_path / "b"))
    for name in ("report.json", "records.jsonl", "model.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_reusing_a_model_skips_training(tmp_path):
    recordings = tuple(write_suite(tmp_path / "data", generate_suite(seed=2, sources=(("small", 6),))))
    run_experiment(ExperimentConfig(recordings=recordings, out_dir=tmp_path / "train"))
    report = run_experiment(ExperimentConfig(
        recordings=recordings, out_dir=tmp_path / "reuse", model_path=tmp_path / "train" / "model.json", replay=False,
    ))
    assert not (tmp_path / "reuse" / "weights.jsonl").exists()
    assert report.sequences == 6


def test_no_sequences_after_calibration(tmp_path, meta):
    frames = np.arange(1, 20)
    scene = Scene(meta, {1: make_track(1, frames, frames * 1.0, 5.625, 25.0, 0.0, 2)})
    save_scene(scene, tmp_path / "t.csv", tmp_path / "m.json")
    with pytest.raises(StageError, match="calibrate: no sequences after calibration"):
        run_experiment(ExperimentConfig(recordings=((tmp_path / "t.csv", tmp_path / "m.json"),), out_dir=tmp_path / "out"))


def test_stage_name_attached_to_load_failures(tmp_path, meta):
    (tmp_path / "t.csv").write_text("frame,id\n1,1\n")
    (tmp_path / "m.json").write_text("{}")
    with pytest.raises(StageError) as info:
        run_experiment(ExperimentConfig(recordings=((tmp_path / "t.csv", tmp_path / "m.json"),), out_dir=tmp_path / "out"))
    assert info.value.stage == "load"
