"""Gains and tuning settings of the cascaded PID baseline"""

import math
from dataclasses import dataclass, field

from ballbot_nav.config import ConfigError
from ballbot_nav.dynamics.state import FAILURE_TILT_DEG


@dataclass(frozen=True)
class PidGains:
    """Gains of both loops. Both horizontal axes share one set.

    Attributes:
        inner_kp: lean error to ball torque [N m/rad]
        inner_ki: integrated lean error to ball torque [N m/(rad s)]
        inner_kd: lean rate to ball torque [N m s/rad]
        outer_kp: velocity error to lean setpoint [rad s/m]
        outer_ki: integrated velocity error to lean setpoint [rad/m]
        outer_kd: acceleration to lean setpoint [rad s^2/m]
        inner_integrator_limit: clamp on the integrated lean error [rad s]
        outer_integrator_limit: clamp on the integrated velocity error [m]
        torque_limit: clamp on each commanded ball torque component [N m]
        max_lean_deg: largest commanded lean angle
    """

    inner_kp: float = 20.0
    inner_ki: float = 0.0
    inner_kd: float = 1.9
    outer_kp: float = 0.1
    outer_ki: float = 0.01
    outer_kd: float = 0.0
    inner_integrator_limit: float = 0.5
    outer_integrator_limit: float = 2.0
    torque_limit: float = 10.0
    max_lean_deg: float = 8.0

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value}")
        for name in (
            "inner_integrator_limit",
            "outer_integrator_limit",
            "torque_limit",
            "max_lean_deg",
        ):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.max_lean_deg < FAILURE_TILT_DEG:
            raise ConfigError(
                f"max_lean_deg must stay below the {FAILURE_TILT_DEG} deg failure tilt"
            )

    @property
    def max_lean(self) -> float:
        """Largest lean setpoint [rad]"""

        return math.radians(self.max_lean_deg)


@dataclass(frozen=True)
class PidConfig:
    """Baseline settings: gains, cruise speed and the flat-terrain search grid.

    Attributes:
        gains: the gains in use
        target_speed: commanded speed along the reward direction [m/s]
        inner_kp_grid: candidate inner proportional gains
        inner_kd_grid: candidate inner derivative gains
        outer_kp_grid: candidate outer proportional gains
        tuning_episodes: flat episodes per candidate
        tuning_horizon: steps per tuning episode
    """

    gains: PidGains = field(default_factory=PidGains)
    target_speed: float = 0.5
    inner_kp_grid: tuple[float, ...] = (15.0, 20.0, 30.0)
    inner_kd_grid: tuple[float, ...] = (1.5, 1.9, 2.5)
    outer_kp_grid: tuple[float, ...] = (0.05, 0.1, 0.2)
    tuning_episodes: int = 10
    tuning_horizon: int = 4000

    def __post_init__(self):
        if isinstance(self.gains, dict):
            object.__setattr__(self, "gains", PidGains(**self.gains))
        for name in ("inner_kp_grid", "inner_kd_grid", "outer_kp_grid"):
            grid = tuple(map(float, getattr(self, name)))
            if not grid:
                raise ConfigError(f"{name} must not be empty")
            object.__setattr__(self, name, grid)
        if not self.target_speed >= 0:
            raise ConfigError(f"target_speed must be >= 0, got {self.target_speed}")
        if self.tuning_episodes < 1 or self.tuning_horizon < 1:
            raise ConfigError("tuning_episodes and tuning_horizon must be >= 1")
