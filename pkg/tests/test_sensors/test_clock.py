"""Tests for clock module"""

import numpy as np
import pytest

from ballbot_nav.sensors import CameraClock, DepthCameraRig, sample_clock
from ballbot_nav.sensors.clock import frame_index

CONTROL_DT = 0.002


@pytest.fixture
def rig():
    return DepthCameraRig(resolution=8)


def _run(clock, steps):
    """Accumulate time the way an environment does and sample every step"""

    t, samples = 0.0, []
    for _ in range(steps):
        samples.append(clock.sample(t))
        t += CONTROL_DT
    return samples


class TestSampleClock:
    """Tests for sample_clock"""

    def test_first_step_captures(self, rig):
        assert sample_clock(0.0, rig) == (True, 0.0)

    def test_boundary_captures_with_zero_age(self, rig):
        t = 2 * rig.frame_interval
        assert sample_clock(t, rig, last_capture=t - 0.004) == (True, 0.0)

    def test_between_ticks_reuses(self, rig):
        new_frame, age = sample_clock(0.006, rig, last_capture=0.0)
        assert not new_frame
        assert age == pytest.approx(0.006)

    def test_disabled(self):
        rig = DepthCameraRig(enabled=False)
        assert sample_clock(0.5, rig) == (False, 0.0)
        assert sample_clock(0.5, rig, last_capture=0.1) == (False, 0.0)

    def test_negative_time(self, rig):
        with pytest.raises(ValueError, match="t must be >= 0"):
            sample_clock(-0.001, rig)

    def test_frame_index_absorbs_float_error(self):
        t = sum([CONTROL_DT] * 25)
        assert frame_index(t, 0.0125) == 4


class TestCameraClock:
    """Tests for CameraClock"""

    def test_reuse_runs_at_500_over_80_hz(self, rig):
        samples = _run(CameraClock(rig), 2000)
        captures = np.flatnonzero([new for new, _ in samples])

        assert captures[:5].tolist() == [0, 7, 13, 19, 25]
        assert set(np.diff(captures).tolist()) <= {6, 7}
        assert len(captures) == 320

    def test_age_bounded_by_interval(self, rig):
        for new_frame, age in _run(CameraClock(rig), 500):
            if new_frame:
                assert age == 0.0
            else:
                assert 0 < age < rig.frame_interval

    def test_reset(self, rig):
        clock = CameraClock(rig)
        clock.sample(0.0)
        clock.sample(0.004)
        clock.reset()
        assert clock.last_capture is None
        assert clock.sample(0.004) == (True, 0.0)
