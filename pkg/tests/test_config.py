import json

import pytest

from services.config import CONFIG_ENV, DEFAULT_BASELINES, Settings, load_settings, parse_baseline, settings_from_dict
from services.errors import ConfigError
from services.irl.optimizer import UpdateDirection


def test_defaults():
    settings = Settings()
    assert settings.kinematics.a_bounds == (-4.0, 3.0)
    assert settings.norms.v_norm == 33.33
    assert settings.irl.step == 0.1
    assert settings.irl.direction is UpdateDirection.ASCENT
    assert settings.mapping.bins == 10
    assert settings.evaluation.baselines == DEFAULT_BASELINES


def test_file_overrides_section_by_section(tmp_path):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({
        "kinematics": {"a_bounds": [-3, 2]},
        "irl": {"step": 0.05, "direction": "descent", "init0": [0.7, 0.3]},
        "evaluation": {"baselines": ["0.6,0.4,0.6,0.4"]},
    }))
    settings = load_settings(path)
    assert settings.kinematics.a_bounds == (-3.0, 2.0)
    assert settings.kinematics.jerk == 1.0
    assert settings.irl.step == 0.05
    assert settings.irl.direction is UpdateDirection.DESCENT
    assert settings.irl.init0.w1 == 0.7
    assert settings.evaluation.baselines == ((0.6, 0.4, 0.6, 0.4),)


def test_environment_variable_names_the_file(tmp_path, monkeypatch):
    path = tmp_path / "env.json"
    path.write_text(json.dumps({"mapping": {"bins": 8}}))
    monkeypatch.setenv(CONFIG_ENV, str(path))
    assert load_settings().mapping.bins == 8


def test_no_file_means_defaults(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV, raising=False)
    assert load_settings() == Settings()


@pytest.mark.parametrize("data, message", [
    ({"mapping": {"bin_count": 3}}, "bin_count"),
    ({"plotting": {}}, "plotting"),
    ({"kinematics": {"a_bounds": [3, -4]}}, "kinematics"),
    ({"irl": {"step": -1}}, "irl"),
])
def test_invalid_config_raises(data, message):
    with pytest.raises(ConfigError, match=message):
        settings_from_dict(data)


def test_missing_or_broken_file(tmp_path):
    with pytest.raises(ConfigError):
        load_settings(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        load_settings(broken)


def test_parse_baseline():
    assert parse_baseline("0.8,0.2,0.8,0.2") == (0.8, 0.2, 0.8, 0.2)
    with pytest.raises(ConfigError):
        parse_baseline("0.8,0.2")
    with pytest.raises(ConfigError):
        parse_baseline("0.9,0.9,0.5,0.5")
