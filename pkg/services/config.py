"""
Run configuration.

Defaults live in the dataclasses below. A JSON file (``--config`` or the path
in MERGEGAME_CONFIG) overrides them section by section, and CLI flags
override the file.
"""
import dataclasses
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from services.errors import ConfigError, ContractViolation
from services.game.payoffs import WeightVector
from services.irl.optimizer import IrlConfig, UpdateDirection
from services.scenario.kinematics import DEFAULT_A_BOUNDS, DEFAULT_JERK, NormalizationConstants

logger = logging.getLogger(__name__)

CONFIG_ENV = "MERGEGAME_CONFIG"
DEFAULT_BASELINES = ((0.8, 0.2, 0.8, 0.2), (0.2, 0.8, 0.2, 0.8))


@dataclass(frozen=True)
class KinematicsSettings:
    a_bounds: tuple[float, float] = DEFAULT_A_BOUNDS
    jerk: float = DEFAULT_JERK
    horizon: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "a_bounds", tuple(float(a) for a in self.a_bounds))
        if len(self.a_bounds) != 2 or self.a_bounds[0] > self.a_bounds[1]:
            raise ContractViolation(f"invalid acceleration bounds {self.a_bounds}")
        if self.jerk < 0 or self.horizon <= 0:
            raise ContractViolation("jerk must be >= 0 and horizon > 0")


@dataclass(frozen=True)
class CalibrationSettings:
    smooth_window: int = 5
    o_scale: float = 0.3
    vy_scale: float = 0.2
    # Taken from the ramp lane's markings when unset
    lane_width: float | None = None


@dataclass(frozen=True)
class MappingSettings:
    bins: int = 10
    variance_floor: float = 1e-4
    converged_only: bool = False


@dataclass(frozen=True)
class EvaluationSettings:
    safety_gap: float = 0.0
    # Recording frame interval when unset
    dt_sim: float | None = None
    baselines: tuple[tuple[float, float, float, float], ...] = DEFAULT_BASELINES
    seed: int = 0


@dataclass(frozen=True)
class Settings:
    kinematics: KinematicsSettings = field(default_factory=KinematicsSettings)
    norms: NormalizationConstants = field(default_factory=NormalizationConstants)
    irl: IrlConfig = field(default_factory=IrlConfig)
    calibration: CalibrationSettings = field(default_factory=CalibrationSettings)
    mapping: MappingSettings = field(default_factory=MappingSettings)
    evaluation: EvaluationSettings = field(default_factory=EvaluationSettings)


def parse_baseline(text) -> tuple[float, float, float, float]:
    """'w1,w2,w1,w2' (or a 4-sequence) -> validated baseline weights."""
    values = text.split(",") if isinstance(text, str) else list(text)
    try:
        weights = tuple(float(v) for v in values)
    except ValueError as e:
        raise ConfigError(f"baseline '{text}' is not a list of numbers") from e
    if len(weights) != 4:
        raise ConfigError(f"baseline needs four weights (w1,w2,w1,w2), got {len(weights)}")
    try:
        WeightVector(*weights[:2])
        WeightVector(*weights[2:])
    except ContractViolation as e:
        raise ConfigError(f"baseline {weights}: {e}") from e
    return weights


def _irl_from_dict(data: dict) -> IrlConfig:
    data = dict(data)
    for key in ("init0", "init1"):
        if key in data:
            data[key] = WeightVector(*data[key])
    if "direction" in data:
        data["direction"] = UpdateDirection(data["direction"])
    return IrlConfig(**data)


_SECTIONS = {
    "kinematics": KinematicsSettings,
    "norms": NormalizationConstants,
    "irl": _irl_from_dict,
    "calibration": CalibrationSettings,
    "mapping": MappingSettings,
    "evaluation": EvaluationSettings,
}


def _merge_section(current, name: str, overrides: dict):
    if not isinstance(overrides, dict):
        raise ConfigError(f"section '{name}' must be an object")
    known = {f.name for f in dataclasses.fields(current)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in section '{name}': {', '.join(unknown)}")
    merged = {f.name: getattr(current, f.name) for f in dataclasses.fields(current)}
    if name == "irl":
        merged["init0"] = [merged["init0"].w1, merged["init0"].w2]
        merged["init1"] = [merged["init1"].w1, merged["init1"].w2]
    if name == "evaluation" and "baselines" in overrides:
        overrides = {**overrides, "baselines": tuple(parse_baseline(b) for b in overrides["baselines"])}
    merged.update(overrides)
    try:
        return _SECTIONS[name](**merged) if name != "irl" else _irl_from_dict(merged)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"section '{name}': {e}") from e


def settings_from_dict(data: dict, base: Settings | None = None) -> Settings:
    settings = base or Settings()
    unknown = sorted(set(data) - set(_SECTIONS))
    if unknown:
        raise ConfigError(f"unknown config section(s): {', '.join(unknown)}")
    updates = {name: _merge_section(getattr(settings, name), name, data[name]) for name in data}
    return dataclasses.replace(settings, **updates)


def load_settings(path: str | os.PathLike | None = None) -> Settings:
    """Defaults, overridden by the given file or the MERGEGAME_CONFIG file."""
    path = path or os.getenv(CONFIG_ENV)
    if not path:
        return Settings()
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError(f"config file {config_path} not found")
    try:
        data = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {config_path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a JSON object")
    logger.info("Loaded configuration from %s", config_path)
    return settings_from_dict(data)
