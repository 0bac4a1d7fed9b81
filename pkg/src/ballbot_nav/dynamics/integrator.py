"""Two-body Newton-Euler integrator for the ballbot.

The ball (centre p) and the body (COM at p + r, r = R_B (0, 0, l)) are
joined by a frictionless pivot at the ball centre. The drive applies a torque
tau to the ball and -tau to the body. Every step solves one 12x12 linear
system for

    x = [a (3), alpha_body (3), alpha_ball (3), N, F1, F2]

made of the combined linear momentum balance, the body's angular momentum
balance about its COM, the ball's angular momentum balance, the normal
contact law and two tangential rows. The normal row is the spring-damper
evaluated at the end of the step,

    N = k (delta - dt n.v+) - c n.v+ ,   v+ = v + dt a,

and dropped when it would pull. The tangential rows enforce rolling
(zero contact-point velocity at the end of the step); when the required force
leaves the Coulomb cone they are replaced by F = mu N d, with d the direction
of the rolling force. Velocities are then advanced with the solved
accelerations and positions with the new velocities (semi-implicit Euler).
"""

from dataclasses import dataclass

import numpy as np

from ballbot_nav.config import SimulationDivergedError, logger
from ballbot_nav.dynamics.contact import (
    ContactFrame,
    contact_geometry,
    nearest_surface_point,
    surface_velocity,
)
from ballbot_nav.dynamics.drive import (
    kinematic_wheel_speeds,
    transmitted_torque,
    wheel_torques,
)
from ballbot_nav.dynamics.params import PhysicalParams
from ballbot_nav.dynamics.rotation import (
    quat_from_axis_angle,
    quat_integrate,
    quat_multiply,
    quat_to_matrix,
    skew,
)
from ballbot_nav.dynamics.state import Action, BallbotState, clamp_action
from ballbot_nav.terrain.field import TerrainField, normal_from_gradient

DEFAULT_DT = 0.002


@dataclass(frozen=True)
class StepResult:
    """Successor state together with the contact that produced it"""

    state: BallbotState
    contact: ContactFrame
    slipping: bool


def _system(state, params, tau_world):
    """Everything the linear solve needs that does not depend on the contact mode"""

    R_B = state.rotation
    r = R_B @ np.array([0.0, 0.0, params.com_height])
    g_vec = np.array([0.0, 0.0, -params.gravity])
    inertia_world = R_B @ params.body_inertia_matrix @ R_B.T
    wB = state.body_omega
    m_B = params.body_mass
    M = params.total_mass

    centripetal = np.cross(wB, np.cross(wB, r))
    r_x = skew(r)

    A = np.zeros((12, 12))
    b = np.zeros(12)

    # combined linear momentum
    A[0:3, 0:3] = M * np.eye(3)
    A[0:3, 3:6] = -m_B * r_x
    b[0:3] = M * g_vec - m_B * centripetal

    # body angular momentum about its COM
    A[3:6, 0:3] = m_B * r_x
    A[3:6, 3:6] = inertia_world - m_B * r_x @ r_x
    b[3:6] = (
        -np.cross(wB, inertia_world @ wB)
        - m_B * np.cross(r, centripetal)
        + m_B * np.cross(r, g_vec)
        - tau_world
    )

    # ball angular momentum about its centre
    A[6:9, 6:9] = params.ball_inertia * np.eye(3)
    b[6:9] = tau_world

    return A, b


def _solve(A, b, state):
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as e:
        raise SimulationDivergedError(
            f"Singular dynamics system at t={state.time:.3f} s", last_state=state
        ) from e
    return x


def _free(A, b):
    """Switch the contact rows to N = F1 = F2 = 0"""

    A[9:12, :] = 0.0
    A[9:12, 9:12] = np.eye(3)
    b[9:12] = 0.0


def advance(
    state: BallbotState,
    action: Action,
    terrain: TerrainField,
    params: PhysicalParams,
    dt: float = DEFAULT_DT,
) -> StepResult:
    """Advance the simulation by one step and report the contact used.

    Args:
        state: current state
        action: motor command in [0, 1]^3, clamped
        terrain: the heightfield
        params: physical parameters
        dt: step size [s]

    Returns:
        The successor state, the contact frame with the solved normal force and
        whether the tangential force was capped by the Coulomb cone.

    Raises:
        PenetrationError: if the ball centre starts below the terrain
        SimulationDivergedError: if the successor state is not finite
    """

    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")

    action = clamp_action(action)
    R_B = state.rotation

    # drive
    omega_rel_body = R_B.T @ (state.ball_omega - state.body_omega)
    tau_body, transmitted = transmitted_torque(action, omega_rel_body, params)
    tau_world = R_B @ tau_body

    point, normal, (t1, t2), arm, delta = contact_geometry(state, terrain, params)
    u = surface_velocity(state, arm)

    A, b = _system(state, params, tau_world)

    # contact force enters the linear and ball angular momentum rows
    for col, direction in zip((9, 10, 11), (normal, t1, t2)):
        A[0:3, col] = -direction
        A[6:9, col] = -np.cross(arm, direction)

    k, c = params.contact_stiffness, params.contact_damping
    gain = k * dt + c
    predicted = delta - dt * (
        np.dot(normal, state.velocity) - dt * params.gravity * normal[2]
    )

    x = None
    slipping = False
    if delta > 0 or predicted > 0:
        A[9, 9] = 1.0
        A[9, 0:3] = gain * dt * normal
        b[9] = k * delta - gain * np.dot(normal, state.velocity)
        for row, tangent in zip((10, 11), (t1, t2)):
            A[row, 0:3] = dt * tangent
            A[row, 6:9] = dt * np.cross(arm, tangent)
            b[row] = -np.dot(u, tangent)

        x = _solve(A, b, state)
        if x[9] < 0:
            x = None
        else:
            friction = x[10:12]
            limit = params.friction * x[9]
            magnitude = float(np.linalg.norm(friction))
            if magnitude > limit:
                slipping = True
                direction = friction / magnitude
                A[10:12, :] = 0.0
                A[10, 10] = A[11, 11] = 1.0
                A[10:12, 9] = -params.friction * direction
                b[10:12] = 0.0
                x = _solve(A, b, state)
                logger.debug(
                    f"Contact slip at t={state.time:.3f} s: "
                    f"rolling force {magnitude:.2f} N > {limit:.2f} N"
                )

    if x is None:
        _free(A, b)
        x = _solve(A, b, state)

    if not np.all(np.isfinite(x)):
        raise SimulationDivergedError(
            f"Non-finite accelerations at t={state.time:.3f} s", last_state=state
        )

    a, alpha_body, alpha_ball = x[0:3], x[3:6], x[6:9]
    normal_force = float(x[9])

    velocity = state.velocity + dt * a
    body_omega = state.body_omega + dt * alpha_body
    ball_omega = state.ball_omega + dt * alpha_ball
    position = state.position + dt * velocity
    orientation = quat_integrate(state.orientation, body_omega, dt)

    # wheel speeds: rolling on the ball plus any spin from saturated motors
    commanded = wheel_torques(action, params)
    slip_speed = state.wheel_speeds - kinematic_wheel_speeds(omega_rel_body, params)
    saturated = np.abs(commanded) > np.abs(transmitted)
    excess = (commanded - transmitted) / params.wheel_inertia
    slip_speed = np.where(saturated, slip_speed + dt * excess, 0.0)
    R_new = quat_to_matrix(orientation)
    omega_rel_new = R_new.T @ (ball_omega - body_omega)
    wheel_speeds = kinematic_wheel_speeds(omega_rel_new, params) + slip_speed

    new_state = BallbotState(
        position=position,
        velocity=velocity,
        ball_omega=ball_omega,
        orientation=orientation,
        body_omega=body_omega,
        wheel_speeds=wheel_speeds,
        time=state.time + dt,
    )
    if not new_state.is_finite():
        raise SimulationDivergedError(
            f"Non-finite state after step at t={state.time:.3f} s", last_state=state
        )

    contact = ContactFrame(
        point=point,
        normal=normal,
        tangents=(t1, t2),
        normal_force=normal_force,
        slip_velocity=u - np.dot(u, normal) * normal,
        penetration=delta,
    )
    return StepResult(state=new_state, contact=contact, slipping=slipping)


def step(
    state: BallbotState,
    action: Action,
    terrain: TerrainField,
    params: PhysicalParams,
    dt: float = DEFAULT_DT,
) -> BallbotState:
    """Advance the simulation by one step of `dt` seconds (default 2 ms)"""

    return advance(state, action, terrain, params, dt).state


def rest_state(
    terrain: TerrainField,
    params: PhysicalParams,
    x: float = 0.0,
    y: float = 0.0,
    tilt_axis=(1.0, 0.0, 0.0),
    tilt_deg: float = 0.0,
    yaw: float = 0.0,
) -> BallbotState:
    """Motionless state touching the ground near (x, y) at static penetration.

    The ball centre sits along the surface normal at distance R minus the
    static sag M g / k, so an upright robot on flat ground starts in
    equilibrium.

    Args:
        terrain: the heightfield
        params: physical parameters
        x, y: horizontal position of the contact [m]
        tilt_axis: horizontal axis the body is tilted about
        tilt_deg: body tilt [deg]
        yaw: body heading [rad]

    Returns:
        The initial state, time 0.
    """

    h, dx, dy = terrain.height_and_gradient(x, y)
    normal = normal_from_gradient(dx, dy)
    position = np.array([x, y, h]) + (
        params.ball_radius - params.rest_penetration
    ) * normal

    orientation = quat_multiply(
        quat_from_axis_angle(tilt_axis, np.radians(tilt_deg)),
        quat_from_axis_angle((0.0, 0.0, 1.0), yaw),
    )
    return BallbotState(position=position, orientation=orientation)


def mechanical_energy(
    state: BallbotState, terrain: TerrainField, params: PhysicalParams
) -> float:
    """Kinetic, gravitational (zero at z = 0) and contact-spring energy [J]"""

    r = state.rotation @ np.array([0.0, 0.0, params.com_height])
    body_velocity = state.velocity + np.cross(state.body_omega, r)
    inertia_world = state.rotation @ params.body_inertia_matrix @ state.rotation.T

    kinetic = 0.5 * (
        params.ball_mass * np.dot(state.velocity, state.velocity)
        + params.ball_inertia * np.dot(state.ball_omega, state.ball_omega)
        + params.body_mass * np.dot(body_velocity, body_velocity)
        + state.body_omega @ inertia_world @ state.body_omega
    )
    gravitational = params.gravity * (
        params.total_mass * state.position[2] + params.body_mass * r[2]
    )

    _, _, distance = nearest_surface_point(terrain, state.position)
    penetration = max(0.0, params.ball_radius - distance)
    spring = 0.5 * params.contact_stiffness * penetration**2

    return float(kinetic + gravitational + spring)
