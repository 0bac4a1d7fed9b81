"""Simulator state, actions and the failure predicate."""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ballbot_nav.dynamics.rotation import IDENTITY, quat_to_matrix, tilt_radians

FAILURE_TILT_DEG = 20.0

# normalised motor commands a in [0, 1]^3; 0.5 is zero torque
Action = np.ndarray
NEUTRAL_ACTION = np.array([0.5, 0.5, 0.5])


def clamp_action(action) -> Action:
    """Clip motor commands into [0, 1]^3"""

    a = np.asarray(action, dtype=np.float64).reshape(3)
    return np.clip(a, 0.0, 1.0)


def _vec3(value=None) -> np.ndarray:
    return np.zeros(3) if value is None else np.asarray(value, dtype=np.float64)


@dataclass(frozen=True)
class BallbotState:
    """Full simulator state. All vectors are in world frame except wheel speeds.

    Attributes:
        position: ball centre p [m]
        velocity: ball centre velocity v [m/s]
        ball_omega: ball angular velocity [rad/s]
        orientation: body orientation as a unit quaternion (w, x, y, z)
        body_omega: body angular velocity [rad/s]
        wheel_speeds: angular velocities of the three omniwheels [rad/s]
        time: simulation time [s]
    """

    position: np.ndarray = field(default_factory=_vec3)
    velocity: np.ndarray = field(default_factory=_vec3)
    ball_omega: np.ndarray = field(default_factory=_vec3)
    orientation: np.ndarray = field(default_factory=lambda: IDENTITY.copy())
    body_omega: np.ndarray = field(default_factory=_vec3)
    wheel_speeds: np.ndarray = field(default_factory=_vec3)
    time: float = 0.0

    def __post_init__(self):
        for name in (
            "position",
            "velocity",
            "ball_omega",
            "body_omega",
            "wheel_speeds",
        ):
            object.__setattr__(self, name, _vec3(getattr(self, name)).reshape(3))
        q = np.asarray(self.orientation, dtype=np.float64).reshape(4)
        object.__setattr__(self, "orientation", q)

    @property
    def rotation(self) -> np.ndarray:
        """Body-to-world rotation matrix"""

        return quat_to_matrix(self.orientation)

    @property
    def planar_velocity(self) -> np.ndarray:
        return self.velocity[:2]

    def as_vector(self) -> np.ndarray:
        """All state components (time last) as one flat array"""

        return np.concatenate(
            [
                self.position,
                self.velocity,
                self.ball_omega,
                self.orientation,
                self.body_omega,
                self.wheel_speeds,
                [self.time],
            ]
        )

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_vector())))

    def replace(self, **changes) -> "BallbotState":
        return replace(self, **changes)


def tilt_angle(state: BallbotState) -> float:
    """Angle between the body z axis and world vertical, degrees in [0, 180]"""

    return math.degrees(tilt_radians(state.orientation))


def is_failure(state: BallbotState) -> bool:
    """True iff the body tilts strictly more than 20 degrees from vertical"""

    return tilt_angle(state) > FAILURE_TILT_DEG
