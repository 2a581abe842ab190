import json

import numpy as np
import pytest

from services import serialization
from services.errors import DataFormatError
from services.evaluation.records import decide_sequence
from services.game.payoffs import WeightVector
from services.irl.batch import optimize_sequence
from services.irl.optimizer import IrlConfig
from services.mapping.model import MappingModel, infer_weights, train_mapping
from services.mapping.observation import EnvironmentObservation
from services.policy.policy_factory import PolicyFactory
from services.scenario.kinematics import ActionLabel, KinematicContext
from tests.conftest import make_sequence

NY, Y = ActionLabel.NYIELD, ActionLabel.YIELD


@pytest.fixture
def sequence(example_ctx):
    other = KinematicContext(gap_init=25.0, gap_ahead=70.0, v0=22.0, v1=24.0, a0=-0.4, a1=0.3, jerk0_mag=1.7)
    return make_sequence([example_ctx, other], labels=[(Y, NY), (NY, NY)])


def test_sequences_survive_a_file(tmp_path, sequence):
    path = tmp_path / "sequences.jsonl"
    assert serialization.write_sequences(path, [sequence]) == 1
    assert serialization.read_sequences(path) == [sequence]


def test_output_is_byte_stable(tmp_path, sequence):
    serialization.write_sequences(tmp_path / "a.jsonl", [sequence])
    serialization.write_sequences(tmp_path / "b.jsonl", [sequence])
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()
    first = json.loads((tmp_path / "a.jsonl").read_text().splitlines()[0])
    assert first["format_version"] == serialization.FORMAT_VERSION


def test_unknown_version_rejected(tmp_path):
    path = tmp_path / "future.jsonl"
    path.write_text(json.dumps({"format_version": 99}) + "\n")
    with pytest.raises(DataFormatError, match="format_version"):
        list(serialization.read_jsonl(path))


def test_malformed_line_reports_position(tmp_path):
    path = tmp_path / "broken.jsonl"
    path.write_text('{"format_version": 1}\n{oops\n')
    with pytest.raises(DataFormatError) as info:
        list(serialization.read_jsonl(path))
    assert info.value.row == 2


def test_nan_is_refused(tmp_path):
    with pytest.raises(ValueError):
        serialization.write_json(tmp_path / "nan.json", {"value": float("nan")})


def test_weight_samples_filter_converged(tmp_path, sequence, norms):
    samples = optimize_sequence(sequence, norms, IrlConfig(max_iters=3))
    path = tmp_path / "weights.jsonl"
    serialization.write_weight_samples(path, samples)
    everything = serialization.read_weight_samples(path)
    converged = serialization.read_weight_samples(path, converged_only=True)
    assert len(everything) == 2
    assert len(converged) == sum(s.converged for s in samples)
    obs, lambda0, _ = everything[0]
    assert obs == sequence.timesteps[0].obs
    assert lambda0 == samples[0].lambda0


def test_model_survives_a_file(tmp_path):
    rng = np.random.default_rng(2)
    samples = [
        (EnvironmentObservation(*np.abs(rng.normal(10.0, 3.0, 5))), WeightVector.from_w1(w), WeightVector.from_w1(1 - w))
        for w in rng.uniform(0.0, 1.0, 60)
    ]
    model = train_mapping(samples)
    serialization.save_model(tmp_path / "model.json", model)
    loaded = serialization.load_model(tmp_path / "model.json")
    probe = EnvironmentObservation(9.0, 11.0, 10.0, 8.0, 12.0)
    np.testing.assert_array_equal(infer_weights(model, probe).posterior0, infer_weights(loaded, probe).posterior0)
    assert loaded.samples == 60


def test_records_survive_a_file(tmp_path, sequence, norms):
    records = decide_sequence(sequence, PolicyFactory.create_policy("adaptive", norms, model=MappingModel.uniform()))
    serialization.write_records(tmp_path / "records.jsonl", records)
    assert serialization.read_records(tmp_path / "records.jsonl") == records


def test_malformed_record_rejected():
    with pytest.raises(DataFormatError):
        serialization.record_from_dict({"sequence_id": "x"})
