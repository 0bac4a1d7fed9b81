"""Camera frame clocking against the control loop.

Cameras tick on the grid k * frame_interval. A control step at time t renders
a new frame iff a tick has passed since the previous capture. The frame
keeps the time it was rendered at, so its age is t - t_capture.
"""

import math

from ballbot_nav.sensors.camera import DepthCameraRig

# absorbs float error in t accumulated from repeated dt additions
TICK_EPS = 1e-9


def frame_index(t: float, interval: float) -> int:
    return math.floor((t + TICK_EPS) / interval)


def sample_clock(
    t: float, rig: DepthCameraRig, last_capture: float | None = None
) -> tuple[bool, float]:
    """Decide whether a control step at time t captures a new frame.

    Args:
        t: simulation time, >= 0
        rig: camera rig giving the frame interval
        last_capture: time of the most recent capture, None before the first

    Returns:
        (use_new_frame, dt) where dt is the age of the frame the step uses.
        A disabled rig never captures and reports dt = 0.
    """

    if not rig.enabled:
        return False, 0.0
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")

    if last_capture is None or frame_index(t, rig.frame_interval) > frame_index(
        last_capture, rig.frame_interval
    ):
        return True, 0.0
    return False, max(0.0, t - last_capture)


class CameraClock:
    """Stateful wrapper around `sample_clock` for one environment"""

    def __init__(self, rig: DepthCameraRig):
        self.rig = rig
        self.last_capture: float | None = None

    def reset(self) -> None:
        self.last_capture = None

    def sample(self, t: float) -> tuple[bool, float]:
        new_frame, age = sample_clock(t, self.rig, self.last_capture)
        if new_frame:
            self.last_capture = t
        return new_frame, age
