"""Navigation environment: terrain, physics, sensors and reward in one loop"""

from dataclasses import dataclass

import numpy as np

from ballbot_nav.config import (
    ConfigError,
    PenetrationError,
    SimulationDivergedError,
    logger,
)
from ballbot_nav.dynamics.integrator import DEFAULT_DT, advance, rest_state
from ballbot_nav.dynamics.params import PhysicalParams
from ballbot_nav.dynamics.state import (
    Action,
    BallbotState,
    NEUTRAL_ACTION,
    clamp_action,
    is_failure,
)
from ballbot_nav.rl.reward import RewardParams, reward, velocity_reward
from ballbot_nav.sensors.camera import DepthCameraRig
from ballbot_nav.sensors.exteroception import Encode, Exteroception
from ballbot_nav.sensors.observation import assemble_observation, observation_dim
from ballbot_nav.terrain.field import (
    TerrainField,
    TerrainParams,
    flattest_point,
    generate_terrain,
)
from ballbot_nav.utils import TRAIN_SEED_RANGE, check_seed_range

TRAIN_HORIZON = 4000
INITIAL_TILT_DEG = 2.0
SPAWN_HALF_WIDTH = 1.0
SPAWN_SAMPLES = 9


@dataclass(frozen=True)
class EnvStep:
    """Outcome of one environment step.

    Attributes:
        observation: observation of the reached state
        reward: full step reward
        velocity_reward: the velocity term of `reward`
        failure: the robot fell, or the simulation diverged
        truncated: the episode reached the horizon without failing
        state: the reached state
        frame_age: age of the depth frames in `observation` (0 without cameras)
    """

    observation: np.ndarray
    reward: float
    velocity_reward: float
    failure: bool
    truncated: bool
    state: BallbotState
    frame_age: float = 0.0

    @property
    def done(self) -> bool:
        return self.failure or self.truncated


class BallbotEnv:
    """A ballbot on a random terrain, stepped at 500 Hz.

    Each `reset` draws a fresh terrain seed from the environment's own RNG
    (or takes one) and places the robot at rest on the flattest point within
    a metre of the origin. The spawn point depends only on the terrain. The
    body starts upright with a random tilt of at most `initial_tilt_deg`.
    Episodes end at failure or after `horizon` steps.

    Usage:

    ```python
    env = BallbotEnv(TerrainParams(), rig=DepthCameraRig(enabled=False), seed=3)
    obs = env.reset()
    outcome = env.step(action)
    outcome.reward, outcome.done
    ```
    """

    def __init__(
        self,
        terrain_params: TerrainParams = TerrainParams(),
        physics: PhysicalParams = PhysicalParams(),
        rig: DepthCameraRig = DepthCameraRig(enabled=False),
        reward_params: RewardParams = RewardParams(),
        horizon: int = TRAIN_HORIZON,
        initial_tilt_deg: float = INITIAL_TILT_DEG,
        seed: int | np.random.SeedSequence = 0,
        encode: Encode | None = None,
        seed_range: tuple[int, int] = TRAIN_SEED_RANGE,
        dt: float = DEFAULT_DT,
    ):
        if rig.enabled and encode is None:
            raise ConfigError("An encoder is required when the depth cameras are on")
        if horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {horizon}")

        self.terrain_params = terrain_params
        self.physics = physics
        self.rig = rig.aimed_at(physics)
        self.reward_params = reward_params
        self.horizon = horizon
        self.initial_tilt_deg = initial_tilt_deg
        self.seed_range = seed_range
        self.dt = dt
        self.rng = np.random.default_rng(seed)
        self.exteroception = (
            Exteroception(self.rig, encode) if self.rig.enabled else None
        )

        self.terrain: TerrainField | None = None
        self.terrain_seed: int | None = None
        self.state: BallbotState | None = None
        self.observation: np.ndarray | None = None
        self.last_action: Action = NEUTRAL_ACTION.copy()
        self.steps = 0
        self.episode_reward = 0.0

    @property
    def obs_dim(self) -> int:
        return observation_dim(self.rig.enabled)

    def reset(self, terrain_seed: int | None = None) -> np.ndarray:
        """Start a new episode on a new terrain and return its first observation"""

        if terrain_seed is None:
            terrain_seed = int(self.rng.integers(*self.seed_range))
        self.terrain_seed = check_seed_range(terrain_seed, self.seed_range)
        self.terrain = generate_terrain(self.terrain_params.with_seed(terrain_seed))

        heading = self.rng.uniform(0.0, 2 * np.pi)
        tilt = self.rng.uniform(0.0, self.initial_tilt_deg)
        x, y = flattest_point(self.terrain, SPAWN_HALF_WIDTH, SPAWN_SAMPLES)
        self.state = rest_state(
            self.terrain,
            self.physics,
            x=x,
            y=y,
            tilt_axis=(np.cos(heading), np.sin(heading), 0.0),
            tilt_deg=tilt,
        )
        self.last_action = NEUTRAL_ACTION.copy()
        self.steps = 0
        self.episode_reward = 0.0
        if self.exteroception is not None:
            self.exteroception.reset()

        self.observation, _ = self._observe(self.state)
        logger.debug(
            f"Episode reset on terrain {terrain_seed} with {tilt:.2f} deg tilt"
        )
        return self.observation

    def _observe(self, state: BallbotState) -> tuple[np.ndarray, float]:
        if self.exteroception is None:
            return assemble_observation(state, self.last_action).vector, 0.0
        z1, z2, age = self.exteroception.observe(state, self.terrain)
        obs = assemble_observation(state, self.last_action, z1, z2, age)
        return obs.vector, age

    def step(self, action) -> EnvStep:
        """Apply a motor command for one control period"""

        if self.state is None:
            raise ConfigError("BallbotEnv.reset must be called before step")

        action = clamp_action(action)
        diverged = False
        try:
            state = advance(
                self.state, action, self.terrain, self.physics, self.dt
            ).state
        except (SimulationDivergedError, PenetrationError) as e:
            logger.warning(
                f"Simulation diverged on terrain {self.terrain_seed} at step "
                f"{self.steps}, episode recorded as a failure: {e}"
            )
            state = getattr(e, "last_state", None) or self.state
            diverged = True

        self.state = state
        self.last_action = action
        self.steps += 1

        failure = diverged or is_failure(state)
        r = reward(state, action, self.reward_params)
        if diverged and not is_failure(state):
            # a diverged step earns no survival bonus
            r -= self.reward_params.survival_weight
        truncated = not failure and self.steps >= self.horizon
        self.episode_reward += r

        self.observation, age = self._observe(state)
        if failure or truncated:
            logger.debug(
                f"Episode on terrain {self.terrain_seed} ended after {self.steps} "
                f"steps ({'failure' if failure else 'horizon'}), "
                f"reward {self.episode_reward:.3f}"
            )
        return EnvStep(
            observation=self.observation,
            reward=r,
            velocity_reward=velocity_reward(state, self.reward_params),
            failure=failure,
            truncated=truncated,
            state=state,
            frame_age=age,
        )
