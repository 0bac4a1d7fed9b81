"""Physical parameters of the simulated ballbot."""

from dataclasses import dataclass, asdict, replace

import numpy as np

from ballbot_nav.config import ConfigError

GRAVITY = 9.81


@dataclass(frozen=True)
class PhysicalParams:
    """Physical constants of the ball, body, drive and contact.

    The body pivots freely about the ball centre. Three omniwheels sit on the
    ball at the given azimuths and zenith angle (measured from the body z axis).

    Attributes:
        ball_radius: R [m]
        ball_mass: m_b [kg]
        ball_inertia: moment of inertia of the ball about its centre [kg m^2]
        body_mass: m_B [kg]
        body_inertia: principal moments of the body about its centre of mass [kg m^2]
        com_height: l, distance from ball centre to body centre of mass [m]
        wheel_azimuths: azimuth of each wheel contact [deg]
        wheel_zenith: zenith angle alpha of the wheel contacts [rad]
        wheel_radius: r_w [m]
        wheel_inertia: inertia of one wheel about its axle [kg m^2]
        max_wheel_torque: tau_max [N m]
        drive_slip_force: largest tangential force a wheel transmits before slipping [N]
        idler_friction: viscous friction of the idler rollers [N m s/rad]
        friction: ball-ground Coulomb coefficient mu
        contact_stiffness: normal spring constant [N/m]
        contact_damping: normal damping constant [N s/m]
        gravity: g [m/s^2]
    """

    ball_radius: float = 0.12
    ball_mass: float = 2.0
    ball_inertia: float = 0.4 * 2.0 * 0.12**2
    body_mass: float = 8.0
    body_inertia: tuple[float, float, float] = (0.24, 0.24, 0.04)
    com_height: float = 0.3
    wheel_azimuths: tuple[float, float, float] = (0.0, 120.0, 240.0)
    wheel_zenith: float = np.pi / 4
    wheel_radius: float = 0.05
    wheel_inertia: float = 2e-4
    max_wheel_torque: float = 4.0
    drive_slip_force: float = 70.0
    idler_friction: float = 1e-4
    friction: float = 0.8
    contact_stiffness: float = 4e5
    contact_damping: float = 3e3
    gravity: float = GRAVITY

    def __post_init__(self):
        object.__setattr__(self, "body_inertia", tuple(map(float, self.body_inertia)))
        object.__setattr__(
            self, "wheel_azimuths", tuple(map(float, self.wheel_azimuths))
        )

        positive = {
            "ball_radius": self.ball_radius,
            "ball_mass": self.ball_mass,
            "ball_inertia": self.ball_inertia,
            "body_mass": self.body_mass,
            "com_height": self.com_height,
            "wheel_radius": self.wheel_radius,
            "wheel_inertia": self.wheel_inertia,
            "max_wheel_torque": self.max_wheel_torque,
            "drive_slip_force": self.drive_slip_force,
            "friction": self.friction,
            "contact_stiffness": self.contact_stiffness,
            "gravity": self.gravity,
        }
        for name, value in positive.items():
            if not value > 0:
                raise ConfigError(f"{name} must be > 0, got {value}")
        if len(self.body_inertia) != 3 or min(self.body_inertia) <= 0:
            raise ConfigError("body_inertia must hold three positive moments")
        if len(self.wheel_azimuths) != 3:
            raise ConfigError("exactly three wheel azimuths are required")
        if not 0 < self.wheel_zenith < np.pi / 2:
            raise ConfigError("wheel_zenith must lie in (0, pi/2)")
        if self.contact_damping < 0 or self.idler_friction < 0:
            raise ConfigError("damping and friction coefficients must be >= 0")

    @property
    def total_mass(self) -> float:
        return self.ball_mass + self.body_mass

    @property
    def body_inertia_matrix(self) -> np.ndarray:
        return np.diag(self.body_inertia)

    @property
    def rest_penetration(self) -> float:
        """Static sag of the contact spring under the full weight"""

        return self.total_mass * self.gravity / self.contact_stiffness

    def replace(self, **changes) -> "PhysicalParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()
        }
