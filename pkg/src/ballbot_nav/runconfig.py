"""Run configuration files.

A run config is a YAML file with the sections

| section   | dataclass         |
|-----------|-------------------|
| terrain   | `TerrainParams`   |
| physics   | `PhysicalParams`  |
| rig       | `DepthCameraRig`  |
| reward    | `RewardParams`    |
| ppo       | `PpoConfig`       |
| eval      | `EvalConfig`      |
| pid       | `PidConfig`       |
| encoder   | `EncoderConfig`   |

plus a top-level `seed`. Every section and key is optional; missing keys take
the dataclass defaults and unknown ones are rejected.

```yaml
seed: 3
rig:
  enabled: false
ppo:
  total_steps: 1000000
```
"""

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import yaml

from ballbot_nav.config import ConfigError
from ballbot_nav.dynamics.params import PhysicalParams
from ballbot_nav.pid.gains import PidConfig, PidGains
from ballbot_nav.rl.pretrain import EncoderConfig
from ballbot_nav.rl.ppo import PpoConfig
from ballbot_nav.rl.reward import RewardParams
from ballbot_nav.sensors.camera import DepthCameraRig
from ballbot_nav.terrain.field import TerrainParams
from ballbot_nav.utils import EVAL_SEED_RANGE, config_hash


@dataclass(frozen=True)
class EvalConfig:
    """Evaluation protocol settings.

    Attributes:
        episodes: evaluation terrains per evaluation
        horizon: evaluation episode length
        interval: updates between evaluations during training
        deterministic: act with the policy mean instead of sampling
        seed_base: first evaluation terrain seed
        horizon_offsets: extra steps added to `horizon` in the horizon scan
        horizon_episodes: terrains per horizon in the horizon scan
        comparison_episodes: terrains per condition in the PID comparison
    """

    episodes: int = 10
    horizon: int = 4000
    interval: int = 10
    deterministic: bool = True
    seed_base: int = EVAL_SEED_RANGE[0]
    horizon_offsets: tuple[int, ...] = (0, 2000, 4000, 8000)
    horizon_episodes: int = 30
    comparison_episodes: int = 100

    def __post_init__(self):
        object.__setattr__(
            self, "horizon_offsets", tuple(map(int, self.horizon_offsets))
        )
        for name in (
            "episodes",
            "horizon",
            "interval",
            "horizon_episodes",
            "comparison_episodes",
        ):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if min(self.horizon_offsets, default=0) < 0:
            raise ConfigError("horizon_offsets must be >= 0")


SECTIONS = {
    "terrain": TerrainParams,
    "physics": PhysicalParams,
    "rig": DepthCameraRig,
    "reward": RewardParams,
    "ppo": PpoConfig,
    "eval": EvalConfig,
    "pid": PidConfig,
    "encoder": EncoderConfig,
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on"""

    terrain: TerrainParams = field(default_factory=TerrainParams)
    physics: PhysicalParams = field(default_factory=PhysicalParams)
    rig: DepthCameraRig = field(default_factory=DepthCameraRig)
    reward: RewardParams = field(default_factory=RewardParams)
    ppo: PpoConfig = field(default_factory=PpoConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    pid: PidConfig = field(default_factory=PidConfig)
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    seed: int = 0

    @classmethod
    def from_dict(cls, payload: dict | None) -> "RunConfig":
        """Build a config from nested dictionaries.

        Raises:
            ConfigError: on unknown sections or keys, or invalid values
        """

        payload = dict(payload or {})
        seed = payload.pop("seed", 0)
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {seed}")

        sections = {}
        for name, values in payload.items():
            if name not in SECTIONS:
                raise ConfigError(
                    f"Unknown config section '{name}'. "
                    f"Valid sections are {', '.join(SECTIONS)}"
                )
            sections[name] = _build_section(name, values or {})
        return cls(**sections, seed=seed)

    def to_dict(self) -> dict:
        out = {name: _plain(asdict(getattr(self, name))) for name in SECTIONS}
        out["seed"] = self.seed
        return out

    def hash(self) -> str:
        """Short stable hash of the whole config"""

        return config_hash(self.to_dict())

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=int(seed))

    def replace(self, **changes) -> "RunConfig":
        return replace(self, **changes)


def _build_section(name: str, values: dict):
    cls = SECTIONS[name]
    if not isinstance(values, dict):
        raise ConfigError(f"Config section '{name}' must be a mapping")
    known = {f.name for f in fields(cls)}
    for key in values:
        if key not in known:
            raise ConfigError(f"Unknown key '{key}' in config section '{name}'")
    if name == "pid" and isinstance(values.get("gains"), dict):
        gain_keys = {f.name for f in fields(PidGains)}
        for key in values["gains"]:
            if key not in gain_keys:
                raise ConfigError(f"Unknown key '{key}' in config section 'pid.gains'")
    try:
        return cls(**values)
    except TypeError as e:
        raise ConfigError(f"Invalid config section '{name}': {e}") from e


def _plain(value):
    """Tuples to lists, recursively, so the dict is YAML and JSON friendly"""

    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def load_config(path: str | Path | None = None) -> RunConfig:
    """Read a YAML run config. None gives the defaults."""

    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file {path} does not exist")
    with open(path) as f:
        payload = yaml.safe_load(f)
    if payload is not None and not isinstance(payload, dict):
        raise ConfigError(f"Config file {path} must hold a mapping")
    return RunConfig.from_dict(payload)


def save_config(config: RunConfig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        yaml.safe_dump(config.to_dict(), f, sort_keys=False)
    return path
