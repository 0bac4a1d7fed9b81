"""Clipped-surrogate policy optimisation"""

from dataclasses import dataclass, asdict

import numpy as np

from ballbot_nav.config import ConfigError, UpdateAbortedError, logger
from ballbot_nav.nn.networks import ActorCritic
from ballbot_nav.nn.optim import Adam
from ballbot_nav.rl.buffer import RolloutBuffer
from ballbot_nav.rl.schedule import LinearMilestoneSchedule


@dataclass(frozen=True)
class PpoConfig:
    """Training hyperparameters.

    Attributes:
        gamma: discount factor
        gae_lambda: GAE parameter
        clip_range: epsilon of the clipped ratio
        ent_coef: entropy bonus weight
        vf_coef: value loss weight
        batch_size: minibatch size
        epochs: passes over each rollout
        steps_per_env: steps collected per environment per rollout
        num_envs: parallel environments
        target_kl: the update stops once the approximate KL exceeds this
        weight_decay: L2 weight decay of the optimiser
        total_steps: training budget in environment steps
        normalize_advantages: standardise advantages per minibatch
        learning_rate: initial learning rate
        lr_milestones: step counts at which the learning rate is divided
        lr_factor: divisor applied at each milestone
        max_grad_norm: global gradient norm clip
        horizon: training episode length
        initial_tilt_deg: largest random tilt at episode start
        checkpoint_interval: updates between checkpoints
    """

    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_range: float = 0.015
    ent_coef: float = 0.001
    vf_coef: float = 2.0
    batch_size: int = 256
    epochs: int = 5
    steps_per_env: int = 2048
    num_envs: int = 10
    target_kl: float = 0.3
    weight_decay: float = 0.01
    total_steps: int = 8_000_000
    normalize_advantages: bool = False
    learning_rate: float = 1e-4
    lr_milestones: tuple[int, ...] = (3_000_000, 6_000_000)
    lr_factor: float = 3.0
    max_grad_norm: float = 0.5
    horizon: int = 4000
    initial_tilt_deg: float = 2.0
    checkpoint_interval: int = 10

    def __post_init__(self):
        object.__setattr__(self, "lr_milestones", tuple(map(int, self.lr_milestones)))
        if not 0 < self.gamma < 1:
            raise ConfigError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not 0 <= self.gae_lambda <= 1:
            raise ConfigError(f"gae_lambda must lie in [0, 1], got {self.gae_lambda}")
        if not self.clip_range > 0:
            raise ConfigError(f"clip_range must be > 0, got {self.clip_range}")
        for name in ("batch_size", "epochs", "steps_per_env", "num_envs", "horizon"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.rollout_size % self.batch_size:
            raise ConfigError(
                f"batch_size {self.batch_size} must divide the rollout size "
                f"{self.rollout_size} (steps_per_env x num_envs)"
            )
        if not 0 <= self.initial_tilt_deg < 20:
            raise ConfigError("initial_tilt_deg must lie in [0, 20)")

    @property
    def rollout_size(self) -> int:
        return self.steps_per_env * self.num_envs

    def schedule(self) -> LinearMilestoneSchedule:
        return LinearMilestoneSchedule(
            self.learning_rate, self.lr_milestones, self.lr_factor
        )


@dataclass
class PpoStats:
    """Averages over the minibatches of one update"""

    policy_loss: float = float("nan")
    value_loss: float = float("nan")
    entropy: float = float("nan")
    approx_kl: float = float("nan")
    clip_fraction: float = float("nan")
    grad_norm: float = float("nan")
    epochs: int = 0
    minibatches: int = 0
    stopped_early: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def surrogate_grad(
    ratio: np.ndarray, advantages: np.ndarray, clip_range: float
) -> np.ndarray:
    """Derivative of -mean(min(r A, clip(r) A)) with respect to each log-prob.

    Zero wherever the clipped branch is the active one.
    """

    unclipped = np.where(
        advantages >= 0, ratio <= 1 + clip_range, ratio >= 1 - clip_range
    )
    return -(ratio * advantages * unclipped) / len(ratio)


def minibatch_losses(
    model: ActorCritic, batch: dict, config: PpoConfig
) -> tuple[dict, tuple]:
    """Forward pass over a minibatch.

    Returns:
        The loss terms and what `minibatch_backward` needs.
    """

    adv = batch["advantages"]
    if config.normalize_advantages and len(adv) > 1:
        adv = (adv - adv.mean()) / (adv.std() + 1e-8)

    dist = model.policy.distribution(batch["observations"])
    log_ratio = dist.log_prob(batch["raw_actions"]) - batch["log_probs"]
    ratio = np.exp(log_ratio)
    clipped = np.clip(ratio, 1 - config.clip_range, 1 + config.clip_range)
    policy_loss = -np.mean(np.minimum(ratio * adv, clipped * adv))

    values = model.value.forward(batch["observations"]).astype(np.float64)
    value_loss = np.mean((values - batch["returns"]) ** 2)
    entropy = np.mean(dist.entropy())

    terms = {
        "loss": policy_loss + config.vf_coef * value_loss - config.ent_coef * entropy,
        "policy_loss": policy_loss,
        "value_loss": value_loss,
        "entropy": entropy,
        "approx_kl": np.mean((ratio - 1) - log_ratio),
        "clip_fraction": np.mean(np.abs(ratio - 1) > config.clip_range),
    }
    return terms, (dist, ratio, adv, values)


def minibatch_backward(
    model: ActorCritic, batch: dict, config: PpoConfig, saved: tuple
) -> None:
    """Accumulate the gradient of the minibatch loss into the parameter store"""

    dist, ratio, adv, values = saved
    d_log_prob = surrogate_grad(ratio, adv, config.clip_range)
    d_mu, d_log_std = dist.log_prob_grads(batch["raw_actions"])
    # entropy of the base Gaussian has slope 1 in each log-std
    d_log_std = (d_log_prob[:, None] * d_log_std).sum(axis=0) - config.ent_coef
    model.policy.backward(d_log_prob[:, None] * d_mu, d_log_std)

    d_values = config.vf_coef * 2 * (values - batch["returns"]) / len(values)
    model.value.backward(d_values)


def ppo_update(
    model: ActorCritic,
    optimizer: Adam,
    buffer: RolloutBuffer,
    config: PpoConfig,
    rng: np.random.Generator,
) -> PpoStats:
    """Optimise the clipped surrogate over a finished rollout.

    Runs `config.epochs` shuffled passes in minibatches of `config.batch_size`.
    As soon as a minibatch measures an approximate KL above `config.target_kl`
    the whole update stops, before that minibatch is applied.

    Args:
        model: the actor-critic being trained
        optimizer: Adam over the model's trainable parameters
        buffer: a finished rollout
        config: hyperparameters
        rng: shuffling RNG

    Returns:
        Loss terms, KL and clip fraction averaged over the applied minibatches.

    Raises:
        UpdateAbortedError: if a minibatch loss is not finite
    """

    keys = ("policy_loss", "value_loss", "entropy", "approx_kl", "clip_fraction")
    history: dict[str, list[float]] = {k: [] for k in keys + ("grad_norm",)}
    stats = PpoStats()

    def summarise() -> PpoStats:
        for k, v in history.items():
            setattr(stats, k, float(np.mean(v)) if v else float("nan"))
        return stats

    for epoch in range(config.epochs):
        for batch in buffer.minibatches(config.batch_size, rng):
            model.store.zero_grad()
            terms, saved = minibatch_losses(model, batch, config)

            if not np.isfinite(terms["loss"]):
                snapshot = summarise().as_dict()
                snapshot.update({k: float(v) for k, v in terms.items()})
                raise UpdateAbortedError(
                    f"Non-finite loss in epoch {epoch}, update aborted", snapshot
                )
            if terms["approx_kl"] > config.target_kl:
                stats.stopped_early = True
                logger.debug(
                    f"KL {terms['approx_kl']:.4f} above {config.target_kl} in "
                    f"epoch {epoch}, stopping the update"
                )
                return summarise()

            minibatch_backward(model, batch, config, saved)
            history["grad_norm"].append(optimizer.step())
            for k in keys:
                history[k].append(float(terms[k]))
            stats.minibatches += 1
        stats.epochs += 1

    return summarise()
