"""Raycast depth cameras aimed at the ball-ground contact point.

Each camera is a pinhole looking from a body-mounted position towards the
point straight below the ball centre (body frame (0, 0, -R)). Rays are
marched against the terrain height function and the first crossing is refined
by bisection. Depth is the distance along the optical axis (z-depth),
normalised to [0, 1] between the near and far clip; misses read 1.0.
"""

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from PIL import Image

from ballbot_nav.config import ConfigError, logger
from ballbot_nav.dynamics.params import PhysicalParams
from ballbot_nav.dynamics.state import BallbotState
from ballbot_nav.terrain.field import TerrainField


@dataclass(frozen=True)
class DepthCameraRig:
    """Two depth cameras on the body.

    Attributes:
        enabled: False selects proprioception-only observations
        resolution: image side length in pixels
        fov_deg: horizontal and vertical field of view
        near: near clip [m]
        far: far clip [m]
        frame_interval: time between frames [s]
        mount_radius: horizontal distance of the cameras from the body axis [m]
        mount_height: height of the cameras above the ball centre [m]
        mount_azimuths_deg: camera azimuths about the body forward (x) axis
        target_depth: the cameras aim at body-frame (0, 0, -target_depth) [m].
            None aims at the ball-ground contact, one ball radius below the
            ball centre; see `aimed_at`.
        march_step: ray marching step [m]
        tolerance: bisection tolerance on the hit distance [m]
    """

    enabled: bool = True
    resolution: int = 128
    fov_deg: float = 60.0
    near: float = 0.05
    far: float = 2.0
    frame_interval: float = 1.0 / 80.0
    mount_radius: float = 0.15
    mount_height: float = 0.3
    mount_azimuths_deg: tuple[float, float] = (35.0, -35.0)
    target_depth: float | None = None
    march_step: float = 0.05
    tolerance: float = 1e-4

    def __post_init__(self):
        object.__setattr__(
            self, "mount_azimuths_deg", tuple(map(float, self.mount_azimuths_deg))
        )
        if int(self.resolution) != self.resolution or self.resolution < 8:
            raise ConfigError(
                f"resolution must be an integer >= 8, got {self.resolution}"
            )
        if not 0 < self.near < self.far:
            raise ConfigError("clip planes must satisfy 0 < near < far")
        if not 0 < self.fov_deg < 180:
            raise ConfigError("fov_deg must lie in (0, 180)")
        if not self.frame_interval > 0:
            raise ConfigError("frame_interval must be > 0")
        if len(self.mount_azimuths_deg) != 2:
            raise ConfigError("exactly two camera mount azimuths are required")
        if not self.march_step > 0 or not self.tolerance > 0:
            raise ConfigError("march_step and tolerance must be > 0")
        if self.target_depth is not None and not self.target_depth > 0:
            raise ConfigError(f"target_depth must be > 0, got {self.target_depth}")

    def aimed_at(self, physics: PhysicalParams) -> "DepthCameraRig":
        """This rig with an unset aim resolved to the contact point of `physics`"""

        if self.target_depth is not None:
            return self
        return replace(self, target_depth=physics.ball_radius)

    @property
    def aim_depth(self) -> float:
        """Depth of the aim point below the ball centre [m]"""

        if self.target_depth is None:
            return PhysicalParams.ball_radius
        return self.target_depth

    @property
    def num_cameras(self) -> int:
        return len(self.mount_azimuths_deg)

    def mount_position(self, camera_index: int) -> np.ndarray:
        """Camera centre in body frame"""

        az = math.radians(self.mount_azimuths_deg[camera_index])
        return np.array(
            [
                self.mount_radius * math.cos(az),
                self.mount_radius * math.sin(az),
                self.mount_height,
            ]
        )

    def camera_axes(self, camera_index: int) -> np.ndarray:
        """Rows (forward, right, up) of the camera frame, in body frame"""

        target = np.array([0.0, 0.0, -self.aim_depth])
        forward = target - self.mount_position(camera_index)
        forward /= np.linalg.norm(forward)
        right = np.cross(forward, [0.0, 0.0, 1.0])
        right /= np.linalg.norm(right)
        up = np.cross(right, forward)
        return np.stack([forward, right, up])

    def ray_directions(self, camera_index: int) -> np.ndarray:
        """Body-frame pixel rays, shape (resolution * resolution, 3).

        Each ray has unit component along the optical axis, so its ray
        parameter equals z-depth. Row 0 is the top of the image.
        """

        forward, right, up = self.camera_axes(camera_index)
        n = self.resolution
        half = math.tan(math.radians(self.fov_deg) / 2)
        coords = ((np.arange(n) + 0.5) / n * 2.0 - 1.0) * half
        u, v = np.meshgrid(coords, coords)
        rays = forward + u[..., None] * right - v[..., None] * up
        return rays.reshape(-1, 3)


@dataclass(frozen=True)
class DepthFrame:
    """A normalised depth image and the simulation time it was rendered at"""

    depth: np.ndarray
    time: float


def cast_rays(
    origin: np.ndarray,
    directions: np.ndarray,
    terrain: TerrainField,
    near: float,
    far: float,
    march_step: float = 0.05,
    tolerance: float = 1e-4,
) -> np.ndarray:
    """Ray parameter of the first terrain crossing for each ray.

    Args:
        origin: shared ray origin, world frame
        directions: ray directions (n, 3), not necessarily unit length
        terrain: the heightfield
        near: smallest ray parameter considered
        far: largest ray parameter considered
        march_step: largest distance between samples along a ray [m]
        tolerance: bisection stops once the bracket is shorter than this [m]

    Returns:
        Ray parameters (n,), `np.inf` where the ray does not reach the
        terrain before `far`.
    """

    directions = np.asarray(directions, dtype=np.float64)
    lengths = np.linalg.norm(directions, axis=1)
    n_samples = int(math.ceil((far - near) * lengths.max() / march_step)) + 1
    params = near + np.arange(n_samples)[None, :] * (march_step / lengths)[:, None]
    params = np.minimum(params, far)

    points = origin + params[..., None] * directions[:, None, :]
    above = points[..., 2] - terrain.height(points[..., 0], points[..., 1])

    below = above <= 0
    hit = below.any(axis=1)
    first = np.argmax(below, axis=1)

    result = np.full(len(directions), np.inf)
    # already under the surface at the near clip
    at_near = hit & (first == 0)
    result[at_near] = near

    refine = np.flatnonzero(hit & (first > 0))
    if refine.size:
        lo = params[refine, first[refine] - 1]
        hi = params[refine, first[refine]]
        d = directions[refine]
        iterations = max(1, int(math.ceil(math.log2(march_step / tolerance))))
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            p = origin + mid[:, None] * d
            under = p[:, 2] - terrain.height(p[:, 0], p[:, 1]) <= 0
            hi = np.where(under, mid, hi)
            lo = np.where(under, lo, mid)
        result[refine] = hi

    return result


def render_depth(
    state: BallbotState, terrain: TerrainField, rig: DepthCameraRig, camera_index: int
) -> DepthFrame:
    """Render one camera's normalised depth image.

    Args:
        state: simulator state giving the body pose
        terrain: the heightfield
        rig: camera rig
        camera_index: 0 or 1

    Returns:
        A (resolution, resolution) frame with values in [0, 1].
    """

    if camera_index not in range(rig.num_cameras):
        raise IndexError(f"camera_index must be 0 or 1, got {camera_index}")

    R_B = state.rotation
    origin = state.position + R_B @ rig.mount_position(camera_index)
    directions = rig.ray_directions(camera_index) @ R_B.T

    depth = cast_rays(
        origin, directions, terrain, rig.near, rig.far, rig.march_step, rig.tolerance
    )
    normalised = np.clip((depth - rig.near) / (rig.far - rig.near), 0.0, 1.0)
    image = normalised.reshape(rig.resolution, rig.resolution)

    return DepthFrame(depth=image.astype(np.float32), time=state.time)


def save_depth_png(frame: DepthFrame, path: str | Path) -> Path:
    """Write a frame as an 8-bit grayscale PNG (near = black, far = white)"""

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pixels = np.round(np.clip(frame.depth, 0.0, 1.0) * 255).astype(np.uint8)
    Image.fromarray(pixels).save(path)
    logger.debug(f"Depth frame at t={frame.time:.3f} s written to {path}")
    return path
