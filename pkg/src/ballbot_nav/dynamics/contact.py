"""Single-point ball-terrain contact."""

from dataclasses import dataclass

import numpy as np

from ballbot_nav.config import PenetrationError
from ballbot_nav.dynamics.params import PhysicalParams
from ballbot_nav.dynamics.state import BallbotState
from ballbot_nav.terrain.field import TerrainField, normal_from_gradient

NEAREST_POINT_ITERATIONS = 4


@dataclass(frozen=True)
class ContactFrame:
    """Contact between the ball and the terrain.

    Attributes:
        point: nearest terrain point to the ball centre [m]
        normal: upward surface normal at `point`
        tangents: (t1, t2) completing a right-handed orthonormal frame with the normal
        normal_force: N >= 0 [N]
        slip_velocity: tangential velocity of the ball surface at the contact [m/s]
        penetration: R minus the distance from the ball centre to the surface [m].
            Negative when the ball is in the air.
    """

    point: np.ndarray
    normal: np.ndarray
    tangents: tuple[np.ndarray, np.ndarray]
    normal_force: float
    slip_velocity: np.ndarray
    penetration: float

    @property
    def in_contact(self) -> bool:
        return self.penetration > 0


def tangent_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two unit tangents (t1, t2) with t1 x t2 = normal.

    t1 is the world x axis projected onto the tangent plane, which is
    well defined because terrain normals always point upward.
    """

    ex = np.array([1.0, 0.0, 0.0])
    t1 = ex - normal[0] * normal
    t1 = t1 / np.linalg.norm(t1)
    t2 = np.cross(normal, t1)
    return t1, t2


def nearest_surface_point(
    terrain: TerrainField, position: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float]:
    """Closest terrain point to `position` and its normal.

    Starts from the point straight below and repeatedly projects the position
    onto the local tangent plane. The result is exact on planes after one pass.

    Args:
        terrain: the heightfield
        position: query point, above the surface

    Returns:
        The surface point, the surface normal there and the distance from
        `position` to the tangent plane at that point.
    """

    px, py, _ = position
    h, dx, dy = terrain.height_and_gradient(px, py)
    point = np.array([px, py, h])
    normal = normal_from_gradient(dx, dy)

    if not terrain.is_flat:
        for _ in range(NEAREST_POINT_ITERATIONS):
            distance = float(np.dot(position - point, normal))
            qx = px - distance * normal[0]
            qy = py - distance * normal[1]
            h, dx, dy = terrain.height_and_gradient(qx, qy)
            point = np.array([qx, qy, h])
            normal = normal_from_gradient(dx, dy)

    return point, normal, float(np.dot(position - point, normal))


def check_penetration(state: BallbotState, terrain: TerrainField) -> None:
    """Raise `PenetrationError` if the ball centre lies below the terrain"""

    x, y, z = state.position
    ground = terrain.height(x, y)
    if z < ground:
        raise PenetrationError(
            f"Ball centre at z={z:.6f} m is below the terrain ({ground:.6f} m) "
            f"at t={state.time:.3f} s"
        )


def contact_geometry(
    state: BallbotState, terrain: TerrainField, params: PhysicalParams
):
    """Surface point, normal, tangents, contact arm and penetration for a state"""

    check_penetration(state, terrain)
    point, normal, distance = nearest_surface_point(terrain, state.position)
    t1, t2 = tangent_basis(normal)
    arm = point - state.position
    return point, normal, (t1, t2), arm, params.ball_radius - distance


def surface_velocity(state: BallbotState, arm: np.ndarray) -> np.ndarray:
    """Velocity of the material ball point touching the ground"""

    return state.velocity + np.cross(state.ball_omega, arm)


def compute_contact(
    state: BallbotState, terrain: TerrainField, params: PhysicalParams
) -> ContactFrame:
    """Contact frame and spring-damper normal force for a state.

    N = k * delta - c * (n . v), floored at 0, and 0 when the ball is not
    touching the ground.

    Args:
        state: simulator state
        terrain: the heightfield
        params: physical parameters

    Returns:
        The contact frame.

    Raises:
        PenetrationError: if the ball centre is below the surface
    """

    point, normal, tangents, arm, penetration = contact_geometry(state, terrain, params)

    force = 0.0
    if penetration > 0:
        force = max(
            0.0,
            params.contact_stiffness * penetration
            - params.contact_damping * float(np.dot(normal, state.velocity)),
        )

    u = surface_velocity(state, arm)
    slip = u - np.dot(u, normal) * normal

    return ContactFrame(
        point=point,
        normal=normal,
        tangents=tangents,
        normal_force=force,
        slip_velocity=slip,
        penetration=penetration,
    )
