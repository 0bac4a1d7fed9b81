"""Training loop: rollouts, updates, evaluation, metrics and checkpoints"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Callable

import numpy as np
import pandas as pd

from ballbot_nav.config import CheckpointError, logger
from ballbot_nav.nn.checkpoint import load_checkpoint, save_checkpoint
from ballbot_nav.nn.networks import ActorCritic
from ballbot_nav.nn.optim import Adam
from ballbot_nav.rl.env import BallbotEnv
from ballbot_nav.rl.ppo import ppo_update
from ballbot_nav.rl.rollout import collect_rollouts
from ballbot_nav.sensors.observation import observation_dim
from ballbot_nav.utils import read_versioned_csv, write_versioned_csv

if TYPE_CHECKING:
    from ballbot_nav.runconfig import RunConfig

METRICS_COLUMNS = [
    "total_steps",
    "update",
    "eval_reward_mean",
    "eval_reward_median",
    "eval_length_mean",
    "policy_loss",
    "value_loss",
    "entropy",
    "approx_kl",
    "clip_fraction",
    "learning_rate",
]

LATEST = "latest.ckpt"

# maps a model to one row per evaluation episode (columns reward_sum, length)
Evaluator = Callable[[ActorCritic], pd.DataFrame]


def build_model(config: RunConfig) -> ActorCritic:
    """Fresh actor-critic for the observation mode of the config.

    In depth mode the pretrained encoder named by `config.encoder.checkpoint`
    is loaded; without one the encoder keeps its random weights.
    """

    depth = config.rig.enabled
    model = ActorCritic(
        observation_dim(depth),
        seed=config.seed,
        encoder_resolution=config.rig.resolution if depth else None,
    )
    if depth:
        path = config.encoder.checkpoint
        if path and Path(path).exists():
            tensors, _, _ = load_checkpoint(path)
            model.load_encoder(tensors)
            logger.info(f"Loaded pretrained encoder from {path}")
        else:
            logger.warning(
                "No pretrained encoder checkpoint found, "
                "using a randomly initialised frozen encoder"
            )
    return model


def make_envs(
    config: RunConfig, model: ActorCritic, seed: int | list[int]
) -> list[BallbotEnv]:
    """One training environment per `config.ppo.num_envs`, each with its own RNG"""

    encode = model.encoder.encode if model.encoder is not None else None
    seeds = np.random.SeedSequence(seed).spawn(config.ppo.num_envs)
    return [
        BallbotEnv(
            config.terrain,
            config.physics,
            config.rig,
            config.reward,
            horizon=config.ppo.horizon,
            initial_tilt_deg=config.ppo.initial_tilt_deg,
            seed=s,
            encode=encode,
        )
        for s in seeds
    ]


def save_training_checkpoint(
    path: str | Path,
    model: ActorCritic,
    optimizer: Adam,
    config: RunConfig,
    total_steps: int,
    update: int,
) -> Path:
    """Model weights, optimiser moments and trainer counters in one file"""

    tensors = model.store.state_dict()
    trainable = {p.name: p.trainable for p in model.store}
    for name, value in optimizer.state_dict().items():
        tensors[name] = value
        trainable[name] = False

    metadata = model.model_metadata()
    metadata.update(
        {
            "config_hash": config.hash(),
            "creation_step": total_steps,
            "total_steps": total_steps,
            "update": update,
            "seed": config.seed,
        }
    )
    return save_checkpoint(path, tensors, metadata, trainable)


def load_training_checkpoint(
    path: str | Path, model: ActorCritic, optimizer: Adam, config: RunConfig
) -> tuple[int, int]:
    """Restore a training checkpoint in place.

    Returns:
        (total_steps, update) recorded in the checkpoint.
    """

    tensors, metadata, _ = load_checkpoint(path)
    if metadata.get("config_hash") != config.hash():
        raise CheckpointError(
            f"Checkpoint {path} was written with config {metadata.get('config_hash')}, "
            f"not {config.hash()}"
        )
    model.load_tensors(tensors)
    optimizer.load_state_dict(tensors)
    return int(metadata["total_steps"]), int(metadata["update"])


def _default_evaluator(config: RunConfig) -> Evaluator:
    from ballbot_nav.harness.evaluation import evaluate_policy

    return lambda model: evaluate_policy(model, config)


def train(
    config: RunConfig,
    out_dir: str | Path,
    evaluator: Evaluator | None = None,
    resume: bool = True,
) -> pd.DataFrame:
    """Train a policy until `config.ppo.total_steps` environment steps.

    Every update collects one rollout and runs `ppo_update` on it. Every
    `config.eval.interval` updates the evaluator scores the policy on
    held-out terrains. The metrics table is rewritten to
    `out_dir/metrics.csv` after each update, and checkpoints go to
    `out_dir/checkpoints/` every `config.ppo.checkpoint_interval` updates and
    at the end.

    Args:
        config: the run configuration
        out_dir: output folder
        evaluator: evaluation hook. Defaults to the harness evaluator.
        resume: continue from `out_dir/checkpoints/latest.ckpt` if it exists

    Returns:
        The metrics table, one row per update.
    """

    ppo = config.ppo
    out_dir = Path(out_dir)
    ckpt_dir = out_dir / "checkpoints"
    metrics_path = out_dir / "metrics.csv"
    evaluator = evaluator or _default_evaluator(config)
    schedule = ppo.schedule()

    model = build_model(config)
    optimizer = Adam(
        model.store.trainable(),
        lr=ppo.learning_rate,
        weight_decay=ppo.weight_decay,
        max_grad_norm=ppo.max_grad_norm,
    )

    total_steps, update = 0, 0
    rows: list[dict] = []
    if resume and (ckpt_dir / LATEST).exists():
        total_steps, update = load_training_checkpoint(
            ckpt_dir / LATEST, model, optimizer, config
        )
        if metrics_path.exists():
            previous = read_versioned_csv(metrics_path)
            rows = previous[previous["update"] <= update].to_dict("records")
        logger.info(f"Resuming training at update {update}, {total_steps} steps")

    envs = make_envs(config, model, [config.seed, update])

    while total_steps < ppo.total_steps:
        optimizer.lr = schedule(total_steps)
        rng = np.random.default_rng([config.seed, update])

        buffer = collect_rollouts(envs, model, ppo, rng)
        stats = ppo_update(model, optimizer, buffer, ppo, rng)
        total_steps += len(buffer)
        update += 1

        row = {
            "total_steps": total_steps,
            "update": update,
            "eval_reward_mean": np.nan,
            "eval_reward_median": np.nan,
            "eval_length_mean": np.nan,
            "policy_loss": stats.policy_loss,
            "value_loss": stats.value_loss,
            "entropy": stats.entropy,
            "approx_kl": stats.approx_kl,
            "clip_fraction": stats.clip_fraction,
            "learning_rate": optimizer.lr,
        }
        if update % config.eval.interval == 0:
            episodes = evaluator(model)
            row["eval_reward_mean"] = episodes["reward_sum"].mean()
            row["eval_reward_median"] = episodes["reward_sum"].median()
            row["eval_length_mean"] = episodes["length"].mean()
            logger.info(
                f"Evaluation at {total_steps} steps: mean reward "
                f"{row['eval_reward_mean']:.3f}, mean length "
                f"{row['eval_length_mean']:.0f}"
            )
        rows.append(row)
        logger.info(
            f"Update {update} ({total_steps} steps): {len(buffer.episodes)} episodes "
            f"ended, policy loss {stats.policy_loss:.5f}, "
            f"value loss {stats.value_loss:.5f}, KL {stats.approx_kl:.5f}"
        )

        metrics = pd.DataFrame(rows, columns=METRICS_COLUMNS)
        write_versioned_csv(metrics, metrics_path, "metrics", config.hash())

        last = total_steps >= ppo.total_steps
        if last or update % ppo.checkpoint_interval == 0:
            save_training_checkpoint(
                ckpt_dir / f"update_{update:05d}.ckpt",
                model,
                optimizer,
                config,
                total_steps,
                update,
            )
            save_training_checkpoint(
                ckpt_dir / LATEST, model, optimizer, config, total_steps, update
            )

    return pd.DataFrame(rows, columns=METRICS_COLUMNS)
