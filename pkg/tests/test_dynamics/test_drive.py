"""Tests for the omniwheel drive"""

import math

import numpy as np
import pytest

from ballbot_nav import dynamics
from ballbot_nav.config import GeometryError
from ballbot_nav.dynamics.drive import wheel_geometry


@pytest.fixture
def params():
    return dynamics.PhysicalParams()


def torque_from_wheel_forces(params, wheel_torques):
    """Sum of contact-point moments of the tangential wheel forces"""

    total = np.zeros(3)
    alpha = params.wheel_zenith
    for beta_deg, tau in zip(params.wheel_azimuths, wheel_torques):
        beta = math.radians(beta_deg)
        direction = np.array(
            [
                math.sin(alpha) * math.cos(beta),
                math.sin(alpha) * math.sin(beta),
                math.cos(alpha),
            ]
        )
        contact_point = params.ball_radius * direction
        tangent = np.array([-math.sin(beta), math.cos(beta), 0.0])
        force = (tau / params.wheel_radius) * tangent
        total += np.cross(contact_point, force)
    return total


class TestWheelTorqueMap:
    """Tests for wheel_torque_map"""

    def test_neutral_is_zero(self, params):
        np.testing.assert_array_equal(
            dynamics.wheel_torque_map(dynamics.NEUTRAL_ACTION, params), np.zeros(3)
        )

    def test_equal_commands_spin_about_body_z(self, params):
        torque = dynamics.wheel_torque_map(np.ones(3), params)
        np.testing.assert_allclose(torque[:2], 0.0, atol=1e-12)
        assert torque[2] > 0

    def test_matches_geometric_construction(self, params):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a = rng.uniform(0, 1, 3)
            tau_w = (2 * a - 1) * params.max_wheel_torque
            np.testing.assert_allclose(
                dynamics.wheel_torque_map(a, params),
                torque_from_wheel_forces(params, tau_w),
                atol=1e-12,
            )

    def test_inputs_clamped(self, params):
        np.testing.assert_array_equal(
            dynamics.wheel_torque_map([2.0, -1.0, 0.5], params),
            dynamics.wheel_torque_map([1.0, 0.0, 0.5], params),
        )


class TestCouplingMatrix:
    """Tests for coupling_matrix and inverse_coupling"""

    def test_cached(self, params):
        assert dynamics.coupling_matrix(params) is dynamics.coupling_matrix(
            dynamics.PhysicalParams()
        )

    def test_read_only(self, params):
        with pytest.raises(ValueError):
            dynamics.coupling_matrix(params)[0, 0] = 1.0

    def test_inverse(self, params):
        J = dynamics.coupling_matrix(params)
        np.testing.assert_allclose(
            J @ dynamics.inverse_coupling(params), np.eye(3), atol=1e-12
        )

    def test_singular_geometry(self):
        params = dynamics.PhysicalParams(wheel_azimuths=(0.0, 0.0, 120.0))
        with pytest.raises(GeometryError, match="singular"):
            dynamics.inverse_coupling(params)

    def test_kinematic_wheel_speeds(self, params):
        omega = np.array([0.3, -1.2, 0.7])
        np.testing.assert_allclose(
            dynamics.kinematic_wheel_speeds(omega, params),
            dynamics.coupling_matrix(params).T @ omega,
        )


class TestTransmittedTorque:
    """Tests for the slip cap and idler friction"""

    def test_slip_cap(self, params):
        _, transmitted = dynamics.transmitted_torque(
            np.array([1.0, 0.5, 0.0]), np.zeros(3), params
        )
        cap = params.drive_slip_force * params.wheel_radius
        np.testing.assert_allclose(transmitted, [cap, 0.0, -cap])

    def test_unsaturated_matches_torque_map(self, params):
        a = np.array([0.6, 0.45, 0.52])
        torque, _ = dynamics.transmitted_torque(a, np.zeros(3), params)
        np.testing.assert_allclose(torque, dynamics.wheel_torque_map(a, params))

    def test_idler_direction_is_nearly_free(self, params):
        """Ball rotation about a wheel's drive direction only meets idler friction"""

        _, drive = wheel_geometry(params)
        J = dynamics.coupling_matrix(params)
        for i in range(3):
            resistance, _ = dynamics.transmitted_torque(
                dynamics.NEUTRAL_ACTION, drive[i], params
            )
            drive_response = np.linalg.norm(J[:, i]) * params.max_wheel_torque
            assert np.linalg.norm(resistance) < 0.01 * drive_response

    def test_idler_friction_opposes_rotation(self, params):
        omega = np.array([0.0, 2.0, 0.0])
        resistance, _ = dynamics.transmitted_torque(
            dynamics.NEUTRAL_ACTION, omega, params
        )
        assert np.dot(resistance, omega) < 0
