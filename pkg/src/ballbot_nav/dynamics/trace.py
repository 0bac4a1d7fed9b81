"""Per-step state traces"""

from pathlib import Path

import pandas as pd

from ballbot_nav.config import logger
from ballbot_nav.dynamics.state import BallbotState, tilt_angle
from ballbot_nav.utils import write_versioned_csv

TRACE_COLUMNS = [
    "t",
    "px",
    "py",
    "pz",
    "qw",
    "qx",
    "qy",
    "qz",
    "vx",
    "vy",
    "vz",
    "wx",
    "wy",
    "wz",
    "m1",
    "m2",
    "m3",
    "tilt",
    "normal_force",
]


class StateTrace:
    """Collects one row per simulated step.

    Usage:

    ```python
    trace = StateTrace()
    result = advance(state, action, terrain, params)
    trace.record(result.state, result.contact.normal_force)
    trace.to_frame()
    ```
    """

    def __init__(self):
        self._rows: list[list[float]] = []

    def __len__(self) -> int:
        return len(self._rows)

    def record(self, state: BallbotState, normal_force: float) -> None:
        self._rows.append(
            [
                state.time,
                *state.position,
                *state.orientation,
                *state.velocity,
                *state.body_omega,
                *state.wheel_speeds,
                tilt_angle(state),
                normal_force,
            ]
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self._rows, columns=TRACE_COLUMNS)

    def to_csv(self, path: str | Path, cfg_hash: str = "none") -> Path:
        """Write the trace as a versioned CSV"""

        path = write_versioned_csv(self.to_frame(), path, "trace", cfg_hash)
        logger.info(f"State trace with {len(self)} rows written to {path}")
        return path
