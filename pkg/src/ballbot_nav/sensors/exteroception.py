"""Per-environment depth pipeline: clock, latest frames and their embeddings"""

from typing import Callable

import numpy as np

from ballbot_nav.config import logger
from ballbot_nav.dynamics.state import BallbotState
from ballbot_nav.sensors.camera import DepthCameraRig, DepthFrame, render_depth
from ballbot_nav.sensors.clock import CameraClock
from ballbot_nav.sensors.observation import EMBEDDING_DIM
from ballbot_nav.terrain.field import TerrainField

# maps a batch of images (n, 1, H, W) to embeddings (n, 20)
Encode = Callable[[np.ndarray], np.ndarray]


class Exteroception:
    """Renders both cameras when the clock ticks and caches their embeddings.

    Usage:

    ```python
    extero = Exteroception(rig, encode)
    extero.reset()
    z1, z2, age = extero.observe(state, terrain)
    ```
    """

    def __init__(self, rig: DepthCameraRig, encode: Encode):
        self.rig = rig
        self.encode = encode
        self.clock = CameraClock(rig)
        self.frames: tuple[DepthFrame, ...] = ()
        self.embeddings = np.zeros((rig.num_cameras, EMBEDDING_DIM))

    def reset(self) -> None:
        self.clock.reset()
        self.frames = ()
        self.embeddings = np.zeros((self.rig.num_cameras, EMBEDDING_DIM))

    def observe(
        self, state: BallbotState, terrain: TerrainField
    ) -> tuple[np.ndarray, np.ndarray, float]:
        """Embeddings of the latest frames and the frame age at `state.time`"""

        if not self.rig.enabled:
            zeros = np.zeros(EMBEDDING_DIM)
            return zeros, zeros, 0.0

        new_frame, age = self.clock.sample(state.time)
        if new_frame:
            self.frames = tuple(
                render_depth(state, terrain, self.rig, i)
                for i in range(self.rig.num_cameras)
            )
            images = np.stack([f.depth for f in self.frames])[:, None, :, :]
            self.embeddings = np.asarray(self.encode(images), dtype=np.float64)
            logger.debug(f"Depth frames captured at t={state.time:.3f} s")

        return self.embeddings[0], self.embeddings[1], age
