"""Policy observation vectors.

The full observation concatenates, in order,

| field            | width | content                                          |
|------------------|-------|--------------------------------------------------|
| orientation      | 3     | body roll, pitch, yaw [rad]                      |
| angular_velocity | 3     | body angular velocity, world frame [rad/s]       |
| velocity         | 3     | ball centre velocity, world frame [m/s]          |
| wheel_speeds     | 3     | omniwheel angular velocities [rad/s]             |
| last_action      | 3     | previous motor command in [0, 1]                 |
| embedding_1      | 20    | encoder output for camera 0                      |
| embedding_2      | 20    | encoder output for camera 1                      |
| frame_age        | 1     | time since the depth frames were rendered [s]    |

for 56 values. Without cameras only the first five fields are used (15 values).
"""

from dataclasses import dataclass

import numpy as np

from ballbot_nav.config import ObservationError
from ballbot_nav.dynamics.rotation import roll_pitch_yaw
from ballbot_nav.dynamics.state import BallbotState

EMBEDDING_DIM = 20

OBSERVATION_LAYOUT: tuple[tuple[str, int], ...] = (
    ("orientation", 3),
    ("angular_velocity", 3),
    ("velocity", 3),
    ("wheel_speeds", 3),
    ("last_action", 3),
    ("embedding_1", EMBEDDING_DIM),
    ("embedding_2", EMBEDDING_DIM),
    ("frame_age", 1),
)

PROPRIO_FIELDS = 5
PROPRIO_DIM = sum(width for _, width in OBSERVATION_LAYOUT[:PROPRIO_FIELDS])
FULL_DIM = sum(width for _, width in OBSERVATION_LAYOUT)


def layout_signature(depth: bool = True) -> str:
    """Compact text form of the layout, stored with checkpoints"""

    fields = OBSERVATION_LAYOUT if depth else OBSERVATION_LAYOUT[:PROPRIO_FIELDS]
    return ",".join(f"{name}:{width}" for name, width in fields)


def field_slice(name: str) -> slice:
    """Position of a named field inside the observation vector"""

    start = 0
    for field_name, width in OBSERVATION_LAYOUT:
        if field_name == name:
            return slice(start, start + width)
        start += width
    raise KeyError(name)


def observation_dim(depth: bool) -> int:
    return FULL_DIM if depth else PROPRIO_DIM


@dataclass(frozen=True)
class Observation:
    """An assembled observation vector"""

    vector: np.ndarray

    @property
    def has_depth(self) -> bool:
        return self.vector.shape[0] == FULL_DIM

    @property
    def proprio(self) -> np.ndarray:
        return self.vector[:PROPRIO_DIM]

    def field(self, name: str) -> np.ndarray:
        s = field_slice(name)
        if s.stop > self.vector.shape[0]:
            raise ObservationError(f"Field {name} is not part of this observation")
        return self.vector[s]

    def __len__(self) -> int:
        return self.vector.shape[0]


def _part(name: str, value, width: int) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64).ravel()
    if arr.shape[0] != width:
        raise ObservationError(
            f"Observation field {name} needs {width} values, got {arr.shape[0]}"
        )
    return arr


def proprioception(state: BallbotState, last_action) -> np.ndarray:
    """The 15 proprioceptive values of a state"""

    return np.concatenate(
        [
            roll_pitch_yaw(state.orientation),
            state.body_omega,
            state.velocity,
            state.wheel_speeds,
            _part("last_action", last_action, 3),
        ]
    )


def assemble_observation(
    state: BallbotState, last_action, z1=None, z2=None, frame_age=None
) -> Observation:
    """Build the observation vector for a state.

    Args:
        state: simulator state
        last_action: previous motor command
        z1: camera 0 embedding, or None in proprioception-only mode
        z2: camera 1 embedding
        frame_age: seconds since the frames were rendered

    Returns:
        A 56-value observation, or 15 values when all exteroceptive inputs are None.
    """

    parts = [proprioception(state, last_action)]

    extero = (z1, z2, frame_age)
    if all(v is None for v in extero):
        return Observation(parts[0])
    if any(v is None for v in extero):
        raise ObservationError("z1, z2 and frame_age must be given together")

    parts.append(_part("embedding_1", z1, EMBEDDING_DIM))
    parts.append(_part("embedding_2", z2, EMBEDDING_DIM))
    parts.append(_part("frame_age", frame_age, 1))
    vector = np.concatenate(parts)

    if vector.shape[0] != FULL_DIM:
        raise ObservationError(
            f"Observation has {vector.shape[0]} values, expected {FULL_DIM}"
        )
    return Observation(vector)
