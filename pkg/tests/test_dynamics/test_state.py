"""Tests for state, params and rotation helpers"""

import math

import numpy as np
import pytest

from ballbot_nav import dynamics
from ballbot_nav.config import ConfigError
from ballbot_nav.dynamics.rotation import (
    IDENTITY,
    quat_from_axis_angle,
    quat_integrate,
    quat_multiply,
    quat_to_matrix,
    roll_pitch_yaw,
    skew,
)


def tilted(axis, degrees: float) -> dynamics.BallbotState:
    return dynamics.BallbotState(
        orientation=quat_from_axis_angle(axis, math.radians(degrees))
    )


class TestTiltAngle:
    """Tests for tilt_angle"""

    def test_identity(self):
        assert dynamics.tilt_angle(dynamics.BallbotState()) == 0.0

    def test_quarter_turn(self):
        assert dynamics.tilt_angle(tilted((1, 0, 0), 90.0)) == pytest.approx(90.0)

    @pytest.mark.parametrize("azimuth", [0.0, 30.0, 90.0, 200.0, 315.0])
    def test_horizontal_axes(self, azimuth):
        a = math.radians(azimuth)
        state = tilted((math.cos(a), math.sin(a), 0.0), 20.0)
        assert dynamics.tilt_angle(state) == pytest.approx(20.0, abs=1e-9)

    def test_yaw_does_not_tilt(self):
        assert dynamics.tilt_angle(tilted((0, 0, 1), 75.0)) == pytest.approx(0.0)

    def test_upside_down(self):
        assert dynamics.tilt_angle(tilted((0, 1, 0), 180.0)) == pytest.approx(180.0)


class TestIsFailure:
    """Tests for is_failure"""

    def test_below_threshold(self):
        assert not dynamics.is_failure(tilted((1, 0, 0), 19.9))

    def test_above_threshold(self):
        assert dynamics.is_failure(tilted((0, 1, 0), 20.1))

    def test_identity(self):
        assert not dynamics.is_failure(dynamics.BallbotState())


class TestAction:
    """Tests for action clamping"""

    def test_clamp(self):
        np.testing.assert_array_equal(
            dynamics.clamp_action([-0.2, 0.4, 1.7]), [0.0, 0.4, 1.0]
        )

    def test_neutral(self):
        np.testing.assert_array_equal(dynamics.NEUTRAL_ACTION, [0.5, 0.5, 0.5])


class TestBallbotState:
    """Tests for BallbotState"""

    def test_defaults(self):
        state = dynamics.BallbotState()
        np.testing.assert_array_equal(state.orientation, IDENTITY)
        assert state.as_vector().shape == (20,)
        assert state.is_finite()

    def test_replace(self):
        state = dynamics.BallbotState().replace(velocity=[1.0, 2.0, 0.0])
        np.testing.assert_array_equal(state.planar_velocity, [1.0, 2.0])

    def test_not_finite(self):
        state = dynamics.BallbotState(velocity=[np.nan, 0.0, 0.0])
        assert not state.is_finite()


class TestPhysicalParams:
    """Tests for PhysicalParams validation"""

    def test_defaults(self):
        p = dynamics.PhysicalParams()
        assert p.total_mass == 10.0
        assert p.rest_penetration == pytest.approx(10.0 * 9.81 / 4e5)

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"ball_mass": 0.0}, "ball_mass"),
            ({"friction": -1.0}, "friction"),
            ({"max_wheel_torque": 0.0}, "max_wheel_torque"),
            ({"wheel_zenith": math.pi / 2}, "wheel_zenith"),
            ({"body_inertia": (0.2, 0.0, 0.1)}, "body_inertia"),
            ({"wheel_azimuths": (0.0, 120.0)}, "three wheel azimuths"),
        ],
    )
    def test_invalid(self, kwargs, message):
        with pytest.raises(ConfigError, match=message):
            dynamics.PhysicalParams(**kwargs)

    def test_to_dict(self):
        d = dynamics.PhysicalParams().to_dict()
        assert d["wheel_azimuths"] == [0.0, 120.0, 240.0]
        assert dynamics.PhysicalParams(**d) == dynamics.PhysicalParams()


class TestRotation:
    """Tests for quaternion helpers"""

    def test_matrix_is_rotation(self):
        q = quat_from_axis_angle((1.0, 2.0, -0.5), 0.7)
        R = quat_to_matrix(q)
        np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(R) == pytest.approx(1.0)

    def test_multiply_composes_rotations(self):
        a = quat_from_axis_angle((0, 0, 1), 0.3)
        b = quat_from_axis_angle((1, 0, 0), -0.4)
        np.testing.assert_allclose(
            quat_to_matrix(quat_multiply(a, b)),
            quat_to_matrix(a) @ quat_to_matrix(b),
            atol=1e-12,
        )

    def test_integrate_constant_rate(self):
        omega = np.array([0.0, 0.0, 2.0])
        q = IDENTITY
        for _ in range(100):
            q = quat_integrate(q, omega, 0.01)
        np.testing.assert_allclose(q, quat_from_axis_angle((0, 0, 1), 2.0), atol=1e-12)
        assert np.linalg.norm(q) == pytest.approx(1.0, abs=1e-12)

    def test_roll_pitch_yaw(self):
        q = quat_multiply(
            quat_from_axis_angle((0, 0, 1), 0.5),
            quat_multiply(
                quat_from_axis_angle((0, 1, 0), 0.2),
                quat_from_axis_angle((1, 0, 0), -0.1),
            ),
        )
        np.testing.assert_allclose(roll_pitch_yaw(q), [-0.1, 0.2, 0.5], atol=1e-12)

    def test_skew(self):
        v = np.array([1.0, -2.0, 3.0])
        u = np.array([0.5, 0.1, -0.7])
        np.testing.assert_allclose(skew(v) @ u, np.cross(v, u))
