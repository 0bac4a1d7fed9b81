"""Three-omniwheel drive: torque coupling, slip cap and idler friction.

Wheel i touches the ball at body-frame direction
    s_i = (sin a cos b_i, sin a sin b_i, cos a)
for zenith a and azimuth b_i, and pushes the ball surface along its drive
direction d_i = (-sin b_i, cos b_i, 0). A wheel torque tau_i gives a tangential
force tau_i / r_w, hence a ball torque (R / r_w) (s_i x d_i) tau_i about the
ball centre. Those vectors are the columns of the coupling matrix J. Motion
of the ball surface along the wheel axle (ball rotation about d_i) is taken
up by the idler rollers and only sees the idler friction.
"""

from functools import lru_cache

import numpy as np

from ballbot_nav.config import GeometryError
from ballbot_nav.dynamics.params import PhysicalParams
from ballbot_nav.dynamics.state import Action, clamp_action


def wheel_geometry(params: PhysicalParams) -> tuple[np.ndarray, np.ndarray]:
    """Contact directions s_i and drive directions d_i, body frame, one row each"""

    return _geometry(params.wheel_zenith, params.wheel_azimuths)


@lru_cache
def _geometry(zenith: float, azimuths: tuple[float, ...]):
    beta = np.radians(np.asarray(azimuths))
    contact = np.stack(
        [
            np.sin(zenith) * np.cos(beta),
            np.sin(zenith) * np.sin(beta),
            np.full_like(beta, np.cos(zenith)),
        ],
        axis=1,
    )
    drive = np.stack([-np.sin(beta), np.cos(beta), np.zeros_like(beta)], axis=1)
    contact.setflags(write=False)
    drive.setflags(write=False)
    return contact, drive


@lru_cache
def _coupling(
    radius: float, wheel_radius: float, zenith: float, azimuths: tuple[float, ...]
) -> np.ndarray:
    contact, drive = _geometry(zenith, azimuths)
    J = (radius / wheel_radius) * np.cross(contact, drive).T
    J.setflags(write=False)
    return J


def coupling_matrix(params: PhysicalParams) -> np.ndarray:
    """The 3x3 matrix J mapping wheel torques to ball torque in body frame"""

    return _coupling(
        params.ball_radius,
        params.wheel_radius,
        params.wheel_zenith,
        params.wheel_azimuths,
    )


@lru_cache
def _inverse(
    radius: float, wheel_radius: float, zenith: float, azimuths: tuple[float, ...]
) -> np.ndarray:
    J = _coupling(radius, wheel_radius, zenith, azimuths)
    if np.linalg.cond(J) > 1e8:
        raise GeometryError(
            f"Wheel coupling matrix is singular for azimuths {azimuths} "
            f"and zenith {zenith:.4f} rad"
        )
    inv = np.linalg.inv(J)
    inv.setflags(write=False)
    return inv


def inverse_coupling(params: PhysicalParams) -> np.ndarray:
    """J^-1, mapping a desired body-frame ball torque to wheel torques

    Raises:
        GeometryError: if the wheel layout makes J singular
    """

    return _inverse(
        params.ball_radius,
        params.wheel_radius,
        params.wheel_zenith,
        params.wheel_azimuths,
    )


def wheel_torques(action: Action, params: PhysicalParams) -> np.ndarray:
    """Per-wheel commanded torque (2a - 1) tau_max"""

    return (2.0 * clamp_action(action) - 1.0) * params.max_wheel_torque


def wheel_torque_map(action: Action, params: PhysicalParams) -> np.ndarray:
    """Body-frame ball torque J tau_w produced by a motor command"""

    return coupling_matrix(params) @ wheel_torques(action, params)


def transmitted_torque(
    action: Action, omega_rel_body: np.ndarray, params: PhysicalParams
) -> tuple[np.ndarray, np.ndarray]:
    """Ball torque actually delivered through the wheels.

    Each wheel transmits at most `drive_slip_force * wheel_radius`; the idler
    rollers add viscous resistance against ball rotation about each d_i.

    Args:
        action: motor command in [0, 1]^3
        omega_rel_body: ball angular velocity relative to the body, body frame
        params: physical parameters

    Returns:
        The body-frame ball torque and the per-wheel transmitted torques.
    """

    cap = params.drive_slip_force * params.wheel_radius
    transmitted = np.clip(wheel_torques(action, params), -cap, cap)
    torque = coupling_matrix(params) @ transmitted

    if params.idler_friction > 0:
        _, drive = wheel_geometry(params)
        torque = torque - params.idler_friction * drive.T @ (drive @ omega_rel_body)

    return torque, transmitted


def kinematic_wheel_speeds(
    omega_rel_body: np.ndarray, params: PhysicalParams
) -> np.ndarray:
    """Wheel speeds J^T omega_rel that roll on the ball without slipping"""

    return coupling_matrix(params).T @ omega_rel_body
