"""Tests for gains module"""

import math

import pytest

from ballbot_nav.config import ConfigError
from ballbot_nav.pid.gains import PidConfig, PidGains


class TestPidGains:
    """Tests for PidGains"""

    def test_defaults(self):
        gains = PidGains()
        assert (gains.inner_kp, gains.inner_kd) == (20.0, 1.9)
        assert gains.max_lean == pytest.approx(math.radians(8.0))

    def test_non_finite(self):
        with pytest.raises(ConfigError, match="inner_kd must be finite"):
            PidGains(inner_kd=float("nan"))

    def test_limits_positive(self):
        with pytest.raises(ConfigError, match="torque_limit must be > 0"):
            PidGains(torque_limit=0.0)

    def test_lean_below_failure_tilt(self):
        with pytest.raises(ConfigError, match="failure tilt"):
            PidGains(max_lean_deg=20.0)


class TestPidConfig:
    """Tests for PidConfig"""

    def test_gains_from_mapping(self):
        config = PidConfig(gains={"inner_kp": 25.0})
        assert isinstance(config.gains, PidGains)
        assert config.gains.inner_kp == 25.0
        assert config.gains.inner_kd == 1.9

    def test_grids_become_float_tuples(self):
        config = PidConfig(inner_kp_grid=[10, 20])
        assert config.inner_kp_grid == (10.0, 20.0)

    def test_empty_grid(self):
        with pytest.raises(ConfigError, match="outer_kp_grid must not be empty"):
            PidConfig(outer_kp_grid=())

    def test_negative_speed(self):
        with pytest.raises(ConfigError, match="target_speed"):
            PidConfig(target_speed=-1.0)
