"""Cascaded PID: a velocity loop setting lean targets for a balance loop.

Lean angles are measured in the world frame from the body z axis b:
roll = atan2(-b_y, b_z) and pitch = atan2(b_x, b_z), so a positive pitch
leans towards +x and a positive roll towards -y. A positive ball torque about
+y rolls the ball towards +x and pushes the body back, so the balance loop
commands tau = K_p (lean - setpoint) + K_d (lean rate) on both axes.
"""

import numpy as np

from ballbot_nav.dynamics.drive import inverse_coupling
from ballbot_nav.dynamics.integrator import DEFAULT_DT
from ballbot_nav.dynamics.params import PhysicalParams
from ballbot_nav.dynamics.state import Action, BallbotState
from ballbot_nav.pid.gains import PidGains


class PidController:
    """PID on scalars or arrays with a clamped integrator and derivative on measurement.

    Usage:

    ```python
    pid = PidController(kp=1.0, ki=0.1, kd=0.05, integrator_limit=2.0)
    u = pid.update(setpoint, measurement, dt)
    pid.reset()
    ```
    """

    def __init__(
        self,
        kp: float,
        ki: float = 0.0,
        kd: float = 0.0,
        integrator_limit: float = np.inf,
        output_limit: float = np.inf,
    ):
        self.kp = kp
        self.ki = ki
        self.kd = kd
        self.integrator_limit = integrator_limit
        self.output_limit = output_limit
        self.reset()

    def reset(self) -> None:
        self.integral = 0.0
        self.previous = None

    def update(self, setpoint, measurement, dt: float, rate=None):
        """One control step.

        Args:
            setpoint: desired value
            measurement: measured value
            dt: time since the last update [s]
            rate: measured derivative. Finite-differenced from the last
                measurement if None.

        Returns:
            kp e + ki integral(e) - kd d(measurement)/dt, clamped to the output limit.
        """

        measurement = np.asarray(measurement, dtype=np.float64)
        error = np.asarray(setpoint, dtype=np.float64) - measurement

        self.integral = np.clip(
            self.integral + error * dt, -self.integrator_limit, self.integrator_limit
        )
        if rate is None:
            if self.previous is None:
                rate = np.zeros_like(measurement)
            else:
                rate = (measurement - self.previous) / dt
        self.previous = measurement

        out = self.kp * error + self.ki * self.integral - self.kd * np.asarray(rate)
        return np.clip(out, -self.output_limit, self.output_limit)


def lean_angles(state: BallbotState) -> np.ndarray:
    """World-frame (roll, pitch) of the body axis [rad]"""

    b = state.rotation[:, 2]
    return np.array([np.arctan2(-b[1], b[2]), np.arctan2(b[0], b[2])])


def torque_to_action(torque_body: np.ndarray, physics: PhysicalParams) -> Action:
    """Motor command producing a body-frame ball torque, clamped to [0, 1]^3"""

    wheel = inverse_coupling(physics) @ torque_body
    return np.clip((wheel / physics.max_wheel_torque + 1.0) / 2.0, 0.0, 1.0)


class CascadedPid:
    """Velocity loop feeding a balance loop, both at the control rate.

    Implements the controller protocol used by the harness, so it can be run
    with `run_episode` like a policy. The observation is ignored; the
    controller reads the true state.

    Usage:

    ```python
    pid = CascadedPid(PidGains(), PhysicalParams(), target_velocity=(0.0, 0.5))
    pid.reset()
    action = pid.act(observation, state)
    ```

    Raises:
        GeometryError: at construction, if the wheel layout is singular
    """

    def __init__(
        self,
        gains: PidGains,
        physics: PhysicalParams,
        target_velocity=(0.0, 0.0),
        dt: float = DEFAULT_DT,
    ):
        inverse_coupling(physics)
        self.gains = gains
        self.physics = physics
        self.target_velocity = np.asarray(target_velocity, dtype=np.float64)
        self.dt = dt
        self.outer = PidController(
            gains.outer_kp,
            gains.outer_ki,
            gains.outer_kd,
            integrator_limit=gains.outer_integrator_limit,
        )
        self.inner = PidController(
            gains.inner_kp,
            gains.inner_ki,
            gains.inner_kd,
            integrator_limit=gains.inner_integrator_limit,
            output_limit=gains.torque_limit,
        )

    def reset(self) -> None:
        self.outer.reset()
        self.inner.reset()

    def outer_loop(
        self, state: BallbotState, target_velocity=None, dt: float | None = None
    ) -> np.ndarray:
        """(roll, pitch) setpoints from the planar velocity error, within max lean"""

        target = self.target_velocity if target_velocity is None else target_velocity
        push = self.outer.update(target, state.velocity[:2], dt or self.dt)
        # leaning towards +x is positive pitch, towards +y negative roll
        setpoints = np.array([-push[1], push[0]])
        norm = np.linalg.norm(setpoints)
        if norm > self.gains.max_lean:
            setpoints *= self.gains.max_lean / norm
        return setpoints

    def inner_loop(
        self, state: BallbotState, setpoints, dt: float | None = None
    ) -> Action:
        """Motor command driving the lean angles to `setpoints`"""

        out = self.inner.update(
            setpoints, lean_angles(state), dt or self.dt, rate=state.body_omega[:2]
        )
        torque_world = np.array([-out[0], -out[1], 0.0])
        return torque_to_action(state.rotation.T @ torque_world, self.physics)

    def act(self, observation, state: BallbotState) -> Action:
        return self.inner_loop(state, self.outer_loop(state))
