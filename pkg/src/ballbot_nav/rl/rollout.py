"""Rollout collection over parallel environments and single-episode runs"""

from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from ballbot_nav.dynamics.state import Action, BallbotState
from ballbot_nav.nn.networks import ActorCritic
from ballbot_nav.rl.buffer import RolloutBuffer
from ballbot_nav.rl.env import BallbotEnv, EnvStep
from ballbot_nav.rl.ppo import PpoConfig
from ballbot_nav.sensors.observation import field_slice


class Controller(Protocol):
    """Anything that maps an observation (and the true state) to an action"""

    def reset(self) -> None: ...

    def act(self, observation: np.ndarray, state: BallbotState) -> Action: ...


@dataclass(frozen=True)
class EpisodeResult:
    """Summary of one finished episode"""

    seed: int
    reward_sum: float
    length: int
    velocity_reward: float
    failure: bool

    @property
    def reward_mean(self) -> float:
        return self.reward_sum / self.length


def collect_rollouts(
    envs: list[BallbotEnv],
    model: ActorCritic,
    config: PpoConfig,
    rng: np.random.Generator,
) -> RolloutBuffer:
    """Step every environment `config.steps_per_env` times with the current policy.

    Environments keep their episode across calls; finished episodes are reset
    immediately on a fresh terrain. Actions of all environments are sampled in
    one batched forward pass per step.

    Args:
        envs: the environments, each with its own RNG
        model: the actor-critic, used read-only
        config: supplies the rollout length and GAE parameters
        rng: action sampling RNG

    Returns:
        A finished buffer holding advantages and returns, with the completed
        episodes listed in `buffer.episodes`.
    """

    for env in envs:
        if env.observation is None:
            env.reset()

    depth = envs[0].rig.enabled
    ages_at = field_slice("frame_age")
    buffer = RolloutBuffer(config.steps_per_env, len(envs), envs[0].obs_dim)

    for _ in range(config.steps_per_env):
        obs = np.stack([env.observation for env in envs])
        actions, raw, log_probs, values = model.act(obs, rng)

        rewards = np.zeros(len(envs))
        dones = np.zeros(len(envs), dtype=bool)
        bootstrap = np.zeros(len(envs))
        for i, env in enumerate(envs):
            outcome = env.step(actions[i])
            rewards[i] = outcome.reward
            if outcome.done:
                dones[i] = True
                buffer.episodes.append(
                    (env.episode_reward, env.steps, outcome.failure)
                )
                if outcome.truncated:
                    bootstrap[i] = model.values(outcome.observation)[0]
                env.reset()

        ages = obs[:, ages_at][:, 0] if depth else None
        buffer.add(
            obs, actions, raw, log_probs, values, rewards, dones, bootstrap, ages
        )

    last_values = model.values(np.stack([env.observation for env in envs]))
    buffer.finish(last_values, config.gamma, config.gae_lambda)
    return buffer


def run_episode(
    env: BallbotEnv,
    controller: Controller,
    terrain_seed: int | None = None,
    on_step: Callable[[BallbotEnv, Action, EnvStep], None] | None = None,
) -> EpisodeResult:
    """Run one full episode of a controller.

    Args:
        env: the environment; it is reset on `terrain_seed`
        controller: reset before the first step
        terrain_seed: terrain to use, or None to draw one from the env RNG
        on_step: called after every step with the env, the action and the outcome

    Returns:
        The episode summary.
    """

    obs = env.reset(terrain_seed)
    controller.reset()
    velocity = 0.0
    while True:
        action = controller.act(obs, env.state)
        outcome = env.step(action)
        velocity += outcome.velocity_reward
        if on_step is not None:
            on_step(env, action, outcome)
        obs = outcome.observation
        if outcome.done:
            break

    return EpisodeResult(
        seed=env.terrain_seed,
        reward_sum=env.episode_reward,
        length=env.steps,
        velocity_reward=velocity,
        failure=outcome.failure,
    )
