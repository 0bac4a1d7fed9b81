"""Rollout storage and generalised advantage estimation"""

import numpy as np

from ballbot_nav.config import AlignmentError, UsageError


def gae(
    rewards,
    values,
    dones,
    gamma: float = 0.99,
    lam: float = 0.95,
    bootstrap=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Generalised advantage estimates and value targets.

    Sequences run along the first axis; a second axis, if present, holds
    independent environments. `dones[t]` marks the last step of an episode.
    The value of the state after step t is `values[t + 1]` inside an episode
    and `bootstrap[t]` where the sequence stops: 0 after a failure, V(s_H)
    after a horizon cut, V(s_T) at the end of a rollout.

    Args:
        rewards: r_t
        values: V(s_t)
        dones: episode-end flags
        gamma: discount factor
        lam: GAE parameter
        bootstrap: value after the step wherever the sequence stops. Zeros if None.

    Returns:
        (advantages, returns) with returns = advantages + values.
    """

    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=bool)
    if bootstrap is None:
        bootstrap = np.zeros_like(rewards)
    bootstrap = np.asarray(bootstrap, dtype=np.float64)

    shapes = {a.shape for a in (rewards, values, dones, bootstrap)}
    if len(shapes) != 1:
        raise AlignmentError(
            f"rewards, values, dones and bootstrap must align, got shapes "
            f"{rewards.shape}, {values.shape}, {dones.shape}, {bootstrap.shape}"
        )

    T = rewards.shape[0]
    advantages = np.zeros_like(rewards)
    last = np.zeros_like(rewards[0]) if T else 0.0
    for t in reversed(range(T)):
        if t == T - 1:
            next_value = bootstrap[t]
        else:
            next_value = np.where(dones[t], bootstrap[t], values[t + 1])
        delta = rewards[t] + gamma * next_value - values[t]
        last = delta + gamma * lam * np.where(dones[t], 0.0, last)
        advantages[t] = last

    return advantages, advantages + values


class RolloutBuffer:
    """Fixed-size store of transitions from several environments.

    Arrays have shape (steps, num_envs, ...). `bootstrap` holds the value
    that follows a step wherever its sequence stops (see `gae`).

    Usage:

    ```python
    buffer = RolloutBuffer(steps=2048, num_envs=10, obs_dim=56)
    buffer.add(obs, action, u, log_prob, value, reward, done, bootstrap, age)
    ...
    buffer.finish(last_values, gamma=0.99, lam=0.95)
    for batch in buffer.minibatches(256, rng):
        ...
    ```
    """

    def __init__(self, steps: int, num_envs: int, obs_dim: int, action_dim: int = 3):
        self.steps = steps
        self.num_envs = num_envs
        self.obs_dim = obs_dim
        self.observations = np.zeros((steps, num_envs, obs_dim))
        self.actions = np.zeros((steps, num_envs, action_dim))
        self.raw_actions = np.zeros((steps, num_envs, action_dim))
        self.log_probs = np.zeros((steps, num_envs))
        self.values = np.zeros((steps, num_envs))
        self.rewards = np.zeros((steps, num_envs))
        self.dones = np.zeros((steps, num_envs), dtype=bool)
        self.bootstrap = np.zeros((steps, num_envs))
        self.frame_ages = np.zeros((steps, num_envs))
        self.advantages = np.zeros((steps, num_envs))
        self.returns = np.zeros((steps, num_envs))
        self.pos = 0
        self.finished = False
        # completed episodes: (reward sum, length, failure)
        self.episodes: list[tuple[float, int, bool]] = []

    def __len__(self) -> int:
        return self.steps * self.num_envs

    @property
    def full(self) -> bool:
        return self.pos == self.steps

    def add(
        self,
        observations,
        actions,
        raw_actions,
        log_probs,
        values,
        rewards,
        dones,
        bootstrap,
        frame_ages=None,
    ) -> None:
        """Store one step of every environment"""

        if self.full:
            raise UsageError(f"RolloutBuffer already holds {self.steps} steps")
        t = self.pos
        self.observations[t] = observations
        self.actions[t] = actions
        self.raw_actions[t] = raw_actions
        self.log_probs[t] = log_probs
        self.values[t] = values
        self.rewards[t] = rewards
        self.dones[t] = dones
        self.bootstrap[t] = bootstrap
        if frame_ages is not None:
            self.frame_ages[t] = frame_ages
        self.pos += 1

    def finish(self, last_values, gamma: float, lam: float) -> None:
        """Bootstrap the unfinished episodes and compute advantages"""

        if not self.full:
            raise UsageError(
                f"RolloutBuffer holds {self.pos} of {self.steps} steps, cannot finish"
            )
        open_episodes = ~self.dones[-1]
        self.bootstrap[-1] = np.where(open_episodes, last_values, self.bootstrap[-1])
        self.advantages, self.returns = gae(
            self.rewards, self.values, self.dones, gamma, lam, self.bootstrap
        )
        self.finished = True

    def flat(self) -> dict[str, np.ndarray]:
        """Every per-transition array with the step and env axes merged"""

        if not self.finished:
            raise UsageError("RolloutBuffer.finish must be called before reading")
        n = len(self)
        return {
            "observations": self.observations.reshape(n, self.obs_dim),
            "actions": self.actions.reshape(n, -1),
            "raw_actions": self.raw_actions.reshape(n, -1),
            "log_probs": self.log_probs.reshape(n),
            "values": self.values.reshape(n),
            "advantages": self.advantages.reshape(n),
            "returns": self.returns.reshape(n),
        }

    def minibatches(self, batch_size: int, rng: np.random.Generator):
        """Yield shuffled minibatches covering the buffer once"""

        data = self.flat()
        order = rng.permutation(len(self))
        for start in range(0, len(self), batch_size):
            idx = order[start : start + batch_size]
            yield {k: v[idx] for k, v in data.items()}
