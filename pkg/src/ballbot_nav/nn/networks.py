"""Depth encoder, decoder, policy and value networks"""

import math
from pathlib import Path

import numpy as np

from ballbot_nav.config import CheckpointError, ShapeError
from ballbot_nav.nn.checkpoint import load_checkpoint, save_store
from ballbot_nav.nn.distributions import SquashedGaussian
from ballbot_nav.nn.layers import (
    BatchNorm,
    Conv2d,
    Flatten,
    LeakyReLU,
    Linear,
    Sequential,
    Sigmoid,
    Tanh,
    Unflatten,
    Upsample2x,
    conv_output_size,
)
from ballbot_nav.nn.store import ParameterStore

EMBEDDING_DIM = 20
ENCODER_CHANNELS = 32
HIDDEN_WIDTH = 128
ACTION_DIM = 3
LEAKY_SLOPE = 0.01
INITIAL_STD = 0.3

POLICY_OUTPUT_GAIN = 0.01
VALUE_OUTPUT_GAIN = 1.0


def encoder_feature_size(resolution: int) -> int:
    """Side length after the two stride-2 convolutions"""

    size = resolution
    for _ in range(2):
        size = conv_output_size(size, kernel=3, stride=2, padding=1)
    return size


class Encoder:
    """Convolutional depth-image encoder producing 20 values in (-1, 1).

    conv(1→32, 3, s2, p1) → BN → LeakyReLU → conv(32→32, 3, s2, p1) → BN →
    LeakyReLU → flatten → linear(→20) → BN → tanh. A 128×128 input gives
    32×64×64, then 32×32×32 feature maps.
    """

    def __init__(
        self,
        store: ParameterStore,
        rng: np.random.Generator,
        resolution: int = 128,
        prefix: str = "encoder",
    ):
        self.store = store
        self.resolution = resolution
        c = ENCODER_CHANNELS
        side = encoder_feature_size(resolution)
        self.net = Sequential(
            Conv2d(store, f"{prefix}.conv0", 1, c, 3, rng, stride=2, padding=1),
            BatchNorm(store, f"{prefix}.bn0", c),
            LeakyReLU(LEAKY_SLOPE),
            Conv2d(store, f"{prefix}.conv1", c, c, 3, rng, stride=2, padding=1),
            BatchNorm(store, f"{prefix}.bn1", c),
            LeakyReLU(LEAKY_SLOPE),
            Flatten(),
            Linear(store, f"{prefix}.fc", c * side * side, EMBEDDING_DIM, rng),
            BatchNorm(store, f"{prefix}.bn2", EMBEDDING_DIM),
            Tanh(),
            name=prefix,
        )

    def _batch(self, images: np.ndarray) -> np.ndarray:
        x = np.asarray(images, dtype=self.store.dtype)
        r = self.resolution
        if x.shape == (r, r):
            x = x[None, None]
        elif x.ndim == 3 and x.shape[1:] == (r, r):
            x = x[:, None]
        if x.ndim != 4 or x.shape[1:] != (1, r, r):
            raise ShapeError(f"Encoder expects ({r}, {r}) depth images, got {x.shape}")
        return x

    def forward(self, images: np.ndarray) -> np.ndarray:
        """Embeddings (batch, 20) of one image or a batch of images"""

        return self.net.forward(self._batch(images))

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return self.net.backward(grad)

    def encode(self, images: np.ndarray) -> np.ndarray:
        """Eval-mode embeddings as 64-bit floats, for observation assembly"""

        training = self.net.training
        self.net.eval()
        z = self.net.forward(self._batch(images))
        self.net._cache = None
        self.net.train(training)
        return z.astype(np.float64)

    def train(self, mode: bool = True) -> "Encoder":
        self.net.train(mode)
        return self

    def eval(self) -> "Encoder":
        return self.train(False)


class Decoder:
    """Mirror of the encoder, used only to pretrain it as an autoencoder"""

    def __init__(
        self,
        store: ParameterStore,
        rng: np.random.Generator,
        resolution: int = 128,
        prefix: str = "decoder",
    ):
        if resolution % 4:
            raise ShapeError(
                f"Decoder resolution must be divisible by 4, got {resolution}"
            )
        c = ENCODER_CHANNELS
        side = resolution // 4
        self.resolution = resolution
        self.net = Sequential(
            Linear(store, f"{prefix}.fc", EMBEDDING_DIM, c * side * side, rng),
            LeakyReLU(LEAKY_SLOPE),
            Unflatten((c, side, side)),
            Upsample2x(),
            Conv2d(store, f"{prefix}.conv0", c, c, 3, rng, padding=1),
            LeakyReLU(LEAKY_SLOPE),
            Upsample2x(),
            Conv2d(store, f"{prefix}.conv1", c, 1, 3, rng, padding=1, gain=1.0),
            Sigmoid(),
            name=prefix,
        )

    def forward(self, z: np.ndarray) -> np.ndarray:
        return self.net.forward(z)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return self.net.backward(grad)


def mlp(
    store: ParameterStore,
    prefix: str,
    in_features: int,
    out_features: int,
    rng: np.random.Generator,
    output_gain: float,
) -> Sequential:
    """Five linear layers of width 128 with LeakyReLU between them"""

    widths = [in_features] + [HIDDEN_WIDTH] * 4 + [out_features]
    layers = []
    for i in range(5):
        last = i == 4
        gain = output_gain if last else math.sqrt(2)
        name = f"{prefix}.fc{i}"
        layers.append(Linear(store, name, widths[i], widths[i + 1], rng, gain))
        if not last:
            layers.append(LeakyReLU(LEAKY_SLOPE))
    return Sequential(*layers, name=prefix)


class Policy:
    """MLP giving pre-squash action means plus a learnable log-std"""

    def __init__(
        self,
        store: ParameterStore,
        obs_dim: int,
        rng: np.random.Generator,
        prefix: str = "policy",
    ):
        self.store = store
        self.obs_dim = obs_dim
        self.net = mlp(store, prefix, obs_dim, ACTION_DIM, rng, POLICY_OUTPUT_GAIN)
        self.log_std = store.add(
            f"{prefix}.log_std", np.full(ACTION_DIM, math.log(INITIAL_STD))
        )

    def forward(self, obs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(mu, log_std) for a batch of observations"""

        x = _observations(obs, self.obs_dim, self.store.dtype, "Policy")
        return self.net.forward(x), self.log_std.value

    def distribution(self, obs: np.ndarray) -> SquashedGaussian:
        mu, log_std = self.forward(obs)
        return SquashedGaussian(mu, log_std)

    def mean_action(self, obs: np.ndarray) -> np.ndarray:
        """Deterministic action sigmoid(mu) in (0, 1)^3"""

        return self.distribution(obs).mode()

    def backward(self, d_mu: np.ndarray, d_log_std: np.ndarray) -> None:
        self.net.backward(d_mu.astype(self.store.dtype))
        self.log_std.accumulate(d_log_std)


class Value:
    """MLP critic with the same trunk shape as the policy"""

    def __init__(
        self,
        store: ParameterStore,
        obs_dim: int,
        rng: np.random.Generator,
        prefix: str = "value",
    ):
        self.store = store
        self.obs_dim = obs_dim
        self.net = mlp(store, prefix, obs_dim, 1, rng, VALUE_OUTPUT_GAIN)

    def forward(self, obs: np.ndarray) -> np.ndarray:
        """One value per observation, shape (batch,)"""

        x = _observations(obs, self.obs_dim, self.store.dtype, "Value")
        return self.net.forward(x)[:, 0]

    def backward(self, d_value: np.ndarray) -> None:
        self.net.backward(d_value[:, None].astype(self.store.dtype))


def _observations(obs, obs_dim: int, dtype, owner: str) -> np.ndarray:
    x = np.asarray(obs, dtype=dtype)
    if x.ndim == 1:
        x = x[None]
    if x.ndim != 2 or x.shape[1] != obs_dim:
        raise ShapeError(
            f"{owner} expects observations of width {obs_dim}, got {x.shape}"
        )
    return x


class ActorCritic:
    """Policy, critic and (in depth mode) the frozen encoder in one store.

    Usage:

    ```python
    model = ActorCritic(obs_dim=56, seed=0, encoder_resolution=128)
    action, u, log_prob, value = model.act(obs_batch, rng)
    model.save("policy.ckpt")
    ```
    """

    def __init__(
        self,
        obs_dim: int,
        seed: int = 0,
        encoder_resolution: int | None = None,
        dtype=np.float32,
    ):
        rng = np.random.default_rng(seed)
        self.obs_dim = obs_dim
        self.store = ParameterStore(dtype=dtype)
        self.encoder = None
        if encoder_resolution is not None:
            self.encoder = Encoder(self.store, rng, encoder_resolution)
            self.encoder.eval()
            self.store.freeze("encoder.")
        self.policy = Policy(self.store, obs_dim, rng)
        self.value = Value(self.store, obs_dim, rng)

    def act(
        self, obs: np.ndarray, rng: np.random.Generator, deterministic: bool = False
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Actions, pre-squash samples, log-probs and values for a batch.

        Nothing is recorded for backward.
        """

        dist = self.policy.distribution(obs)
        self.policy.net._cache = None
        if deterministic:
            u = dist.mu.copy()
            action = dist.mode()
        else:
            action, u = dist.sample(rng)
        values = self.values(obs)
        return action, u, dist.log_prob(u), values

    def values(self, obs: np.ndarray) -> np.ndarray:
        v = self.value.forward(obs).astype(np.float64)
        self.value.net._cache = None
        return v

    def load_encoder(self, tensors: dict[str, np.ndarray]) -> None:
        """Copy pretrained encoder weights (names starting with "encoder.")"""

        if self.encoder is None:
            raise ShapeError("This model has no encoder")
        for p in self.store:
            if p.name.startswith("encoder."):
                if p.name not in tensors:
                    raise ShapeError(f"Tensor {p.name} is missing from the weights")
                value = np.asarray(tensors[p.name])
                if value.shape != p.shape:
                    raise ShapeError(
                        f"Tensor {p.name} has shape {value.shape}, expected {p.shape}"
                    )
                p.value[...] = value

    def model_metadata(self) -> dict:
        resolution = None if self.encoder is None else self.encoder.resolution
        return {"obs_dim": self.obs_dim, "encoder_resolution": resolution}

    def save(self, path: str | Path, metadata: dict | None = None) -> Path:
        self.store.metadata.update(self.model_metadata())
        self.store.metadata.update(metadata or {})
        return save_store(self.store, path)

    def load_tensors(self, tensors: dict[str, np.ndarray]) -> None:
        """Load model weights, ignoring optimiser entries of trainer checkpoints"""

        prefixes = ("encoder.", "policy.", "value.")
        self.store.load_state_dict(
            {k: v for k, v in tensors.items() if k.startswith(prefixes)}
        )

    @classmethod
    def load(cls, path: str | Path) -> "ActorCritic":
        """Rebuild a model from a checkpoint written by `save` or the trainer"""

        tensors, metadata, _ = load_checkpoint(path)
        if "obs_dim" not in metadata:
            raise CheckpointError(f"Checkpoint {path} does not hold an actor-critic")
        resolution = metadata["encoder_resolution"]
        model = cls(metadata["obs_dim"], encoder_resolution=resolution)
        model.load_tensors(tensors)
        model.store.metadata.update(metadata)
        return model
