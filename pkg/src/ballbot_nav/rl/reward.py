"""Per-step navigation reward"""

import math
from dataclasses import dataclass

import numpy as np

from ballbot_nav.config import ConfigError
from ballbot_nav.dynamics.state import Action, BallbotState, is_failure


@dataclass(frozen=True)
class RewardParams:
    """Reward coefficients and the desired direction of travel.

    Attributes:
        velocity_weight: weight of the planar velocity along `direction`
        survival_weight: bonus for every step outside the failure set
        action_weight: penalty on the squared norm of the motor command
        direction: unit vector g in the ground plane
    """

    velocity_weight: float = 0.01
    survival_weight: float = 0.02
    action_weight: float = 0.0001
    direction: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "direction", tuple(map(float, self.direction)))
        if len(self.direction) != 2:
            raise ConfigError("direction must have two components")
        if not math.isclose(math.hypot(*self.direction), 1.0, abs_tol=1e-9):
            raise ConfigError(f"direction must be a unit vector, got {self.direction}")
        for name in ("velocity_weight", "survival_weight", "action_weight"):
            if not getattr(self, name) >= 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def goal(self) -> np.ndarray:
        return np.array(self.direction)


def velocity_reward(state: BallbotState, params: RewardParams) -> float:
    """The velocity term alone, used to compare controllers"""

    return params.velocity_weight * float(state.planar_velocity @ params.goal)


def reward(state: BallbotState, action: Action, params: RewardParams) -> float:
    """Reward for reaching `state` with motor command `action`.

    r = w_v (v_xy . g) + w_s [not failed] - w_a |a|^2

    Args:
        state: the state reached by the step
        action: the normalised command in [0, 1]^3 that produced it
        params: reward coefficients

    Returns:
        The scalar reward.
    """

    a = np.asarray(action, dtype=np.float64)
    survival = 0.0 if is_failure(state) else params.survival_weight
    penalty = params.action_weight * float(a @ a)
    return velocity_reward(state, params) + survival - penalty
