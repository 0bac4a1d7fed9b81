"""Controllers runnable by the evaluation protocols"""

from dataclasses import replace
from pathlib import Path

import numpy as np

from ballbot_nav.config import CheckpointError, logger
from ballbot_nav.dynamics.state import Action, BallbotState
from ballbot_nav.nn.networks import ActorCritic
from ballbot_nav.pid.controller import CascadedPid
from ballbot_nav.rl.rollout import Controller
from ballbot_nav.sensors.camera import DepthCameraRig


class PolicyController:
    """A trained actor-critic behind the controller protocol.

    Usage:

    ```python
    controller = PolicyController(ActorCritic.load("policy.ckpt"))
    controller.reset()
    action = controller.act(observation, state)
    ```
    """

    def __init__(self, model: ActorCritic, deterministic: bool = True, seed: int = 0):
        self.model = model
        self.deterministic = deterministic
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    @property
    def encode(self):
        return None if self.model.encoder is None else self.model.encoder.encode

    def reset(self) -> None:
        pass

    def act(self, observation: np.ndarray, state: BallbotState) -> Action:
        action, _, _, _ = self.model.act(
            observation[None], self.rng, deterministic=self.deterministic
        )
        return action[0]


def controller_rig(controller: Controller, rig: DepthCameraRig) -> DepthCameraRig:
    """The camera rig a controller needs.

    Policies with an encoder get the configured rig at the encoder's
    resolution; everything else runs without cameras.
    """

    encode = getattr(controller, "encode", None)
    if encode is None:
        return replace(rig, enabled=False)
    return replace(rig, enabled=True, resolution=controller.model.encoder.resolution)


def pid_controller(config, target_speed: float | None = None) -> CascadedPid:
    """The cascaded PID of a run config, driving towards the reward direction"""

    speed = config.pid.target_speed if target_speed is None else target_speed
    return CascadedPid(
        config.pid.gains, config.physics, target_velocity=speed * config.reward.goal
    )


def load_policy(path: str | Path, config) -> ActorCritic:
    """Load an actor-critic checkpoint and check it fits the run config.

    Raises:
        CheckpointError: if the file is missing, or the model's observation
            mode (with or without depth cameras) differs from `config.rig`
    """

    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"Checkpoint {path} does not exist")
    model = ActorCritic.load(path)
    depth = model.encoder is not None
    if depth != config.rig.enabled:
        raise CheckpointError(
            f"Checkpoint {path} was trained {'with' if depth else 'without'} depth "
            f"cameras but the config has rig.enabled={config.rig.enabled}"
        )
    logger.info(f"Loaded policy from {path}")
    return model
