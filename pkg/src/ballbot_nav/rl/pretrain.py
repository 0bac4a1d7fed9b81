"""Depth-encoder pretraining as the encoding half of an autoencoder"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd

from ballbot_nav.config import ConfigError, InsufficientDataError, logger
from ballbot_nav.nn.checkpoint import save_store
from ballbot_nav.nn.networks import Decoder, Encoder
from ballbot_nav.nn.optim import Adam
from ballbot_nav.nn.store import ParameterStore
from ballbot_nav.rl.env import BallbotEnv
from ballbot_nav.rl.rollout import Controller, run_episode
from ballbot_nav.sensors.observation import EMBEDDING_DIM

if TYPE_CHECKING:
    from ballbot_nav.runconfig import RunConfig


@dataclass(frozen=True)
class EncoderConfig:
    """Settings of encoder pretraining.

    Attributes:
        episodes: data-collection episodes, each on a new terrain
        steps_per_episode: episode length cap during collection
        min_samples: fewest depth images accepted for training
        epochs: passes over the training split
        batch_size: images per minibatch
        learning_rate: Adam learning rate
        validation_fraction: share of images held out for the reported loss
        checkpoint: where the pretrained encoder is stored and loaded from
    """

    episodes: int = 20
    steps_per_episode: int = 500
    min_samples: int = 256
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 1e-3
    validation_fraction: float = 0.1
    checkpoint: str | None = None

    def __post_init__(self):
        for name in ("episodes", "steps_per_episode", "epochs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.batch_size < 2:
            raise ConfigError("batch_size must be >= 2 for batch normalisation")
        if not 0 < self.validation_fraction < 1:
            raise ConfigError("validation_fraction must lie in (0, 1)")


def collect_depth_dataset(config: RunConfig, controller: Controller) -> np.ndarray:
    """Depth images rendered while a scripted controller drives on random terrains.

    Frames follow the camera clock, so every camera tick adds one image per camera.

    Returns:
        Images with shape (n, 1, resolution, resolution).
    """

    frames: list[np.ndarray] = []

    def record(images: np.ndarray) -> np.ndarray:
        frames.append(np.array(images))
        return np.zeros((len(images), EMBEDDING_DIM))

    rig = replace(config.rig, enabled=True)
    env = BallbotEnv(
        config.terrain,
        config.physics,
        rig,
        config.reward,
        horizon=config.encoder.steps_per_episode,
        initial_tilt_deg=config.ppo.initial_tilt_deg,
        seed=config.seed,
        encode=record,
    )
    for _ in range(config.encoder.episodes):
        run_episode(env, controller)

    if not frames:
        return np.zeros((0, 1, rig.resolution, rig.resolution))
    images = np.concatenate(frames)
    logger.info(f"Collected {len(images)} depth images for encoder pretraining")
    return images


def reconstruction_loss(encoder: Encoder, decoder: Decoder, images) -> float:
    """Mean squared reconstruction error with the encoder in eval mode"""

    training = encoder.net.training
    encoder.eval()
    x = np.asarray(images, dtype=encoder.store.dtype)
    recon = decoder.forward(encoder.forward(x))
    encoder.net._cache = None
    decoder.net._cache = None
    encoder.train(training)
    return float(np.mean((recon - x) ** 2))


def fit_autoencoder(
    images: np.ndarray,
    settings: EncoderConfig,
    seed: int = 0,
) -> tuple[ParameterStore, pd.DataFrame]:
    """Train encoder and mirror decoder on reconstruction, keep the encoder.

    Args:
        images: depth images (n, 1, R, R) with R divisible by 4
        settings: pretraining settings
        seed: initialisation and shuffling seed

    Returns:
        A store holding only the `encoder.` tensors (all frozen) and the
        per-epoch training and validation losses.

    Raises:
        InsufficientDataError: if there are fewer than `settings.min_samples` images
    """

    n = len(images)
    if n < settings.min_samples:
        raise InsufficientDataError(
            f"Encoder pretraining needs at least {settings.min_samples} images, "
            f"got {n}"
        )

    rng = np.random.default_rng(seed)
    resolution = images.shape[-1]
    store = ParameterStore()
    encoder = Encoder(store, rng, resolution)
    decoder = Decoder(store, rng, resolution)
    optimizer = Adam(store.trainable(), lr=settings.learning_rate, max_grad_norm=None)

    images = np.asarray(images, dtype=store.dtype)
    order = rng.permutation(n)
    n_val = max(1, int(round(n * settings.validation_fraction)))
    validation, training = images[order[:n_val]], images[order[n_val:]]

    history = []
    for epoch in range(settings.epochs):
        encoder.train()
        losses = []
        perm = rng.permutation(len(training))
        for start in range(0, len(training), settings.batch_size):
            idx = perm[start : start + settings.batch_size]
            if len(idx) < 2:
                continue
            x = training[idx]
            store.zero_grad()
            diff = decoder.forward(encoder.forward(x)) - x
            encoder.backward(decoder.backward(2 * diff / diff.size))
            optimizer.step()
            losses.append(float(np.mean(diff**2)))

        row = {
            "epoch": epoch + 1,
            "train_loss": float(np.mean(losses)),
            "validation_loss": reconstruction_loss(encoder, decoder, validation),
        }
        history.append(row)
        logger.info(
            f"Encoder epoch {row['epoch']}: train loss {row['train_loss']:.5f}, "
            f"validation loss {row['validation_loss']:.5f}"
        )

    result = ParameterStore(
        dtype=store.dtype, metadata={"encoder_resolution": resolution, "samples": n}
    )
    for p in store:
        if p.name.startswith("encoder."):
            result.add(p.name, p.value, trainable=False)
    return result, pd.DataFrame(history)


def pretrain_encoder(
    config: RunConfig,
    controller: Controller,
    out_path: str | Path | None = None,
) -> tuple[ParameterStore, pd.DataFrame]:
    """Collect depth images with `controller` and pretrain the encoder on them.

    Args:
        config: run configuration; the `encoder` section holds the settings
        controller: a controller able to balance, e.g. the cascaded PID
        out_path: checkpoint to write, defaults to `config.encoder.checkpoint`

    Returns:
        The encoder store and the loss history.
    """

    images = collect_depth_dataset(config, controller)
    store, history = fit_autoencoder(images, config.encoder, seed=config.seed)
    store.metadata["config_hash"] = config.hash()

    out_path = out_path or config.encoder.checkpoint
    if out_path:
        save_store(store, out_path)
    return store, history
