"""Sigmoid-squashed diagonal Gaussian over actions in (0, 1)^d.

A pre-squash sample u ~ N(mu, sigma^2) maps to a = sigmoid(u). With
sigmoid'(u) = sigmoid(u) (1 - sigmoid(u)) the change of variables gives

    log p(a) = log N(u; mu, sigma) + sum_i [softplus(u_i) + softplus(-u_i)]

PPO ratios only need log-prob differences under a fixed u, so rollouts
store u and the squash correction cancels out of the ratio.
"""

import math

import numpy as np

from ballbot_nav.nn.layers import sigmoid

LOG_2PI = math.log(2 * math.pi)

# keeps logit finite for actions exactly on the box boundary
ACTION_EPS = 1e-6


def softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def logit(a: np.ndarray) -> np.ndarray:
    a = np.clip(a, ACTION_EPS, 1 - ACTION_EPS)
    return np.log(a) - np.log1p(-a)


class SquashedGaussian:
    """Diagonal Gaussian in pre-squash space with a sigmoid squash.

    Args:
        mu: pre-squash means, shape (batch, d)
        log_std: state-independent log standard deviations, shape (d,)
    """

    def __init__(self, mu: np.ndarray, log_std: np.ndarray):
        self.mu = np.asarray(mu, dtype=np.float64)
        self.log_std = np.asarray(log_std, dtype=np.float64)
        self.std = np.exp(self.log_std)

    def sample(self, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Draw (action, pre_squash) pairs"""

        u = self.mu + self.std * rng.standard_normal(self.mu.shape)
        return sigmoid(u), u

    def mode(self) -> np.ndarray:
        """Deterministic action sigmoid(mu)"""

        return sigmoid(self.mu)

    def base_log_prob(self, u: np.ndarray) -> np.ndarray:
        """log N(u; mu, sigma) summed over action dimensions"""

        z = (u - self.mu) / self.std
        return np.sum(-0.5 * z**2 - self.log_std - 0.5 * LOG_2PI, axis=-1)

    def log_prob(self, u: np.ndarray) -> np.ndarray:
        """Log density of the squashed action sigmoid(u)"""

        correction = np.sum(softplus(u) + softplus(-u), axis=-1)
        return self.base_log_prob(u) + correction

    def log_prob_action(self, action: np.ndarray) -> np.ndarray:
        return self.log_prob(logit(np.asarray(action, dtype=np.float64)))

    def entropy(self) -> np.ndarray:
        """Entropy of the base Gaussian, one value per batch row"""

        per_dim = self.log_std + 0.5 * (1 + LOG_2PI)
        return np.full(self.mu.shape[0], per_dim.sum())

    def log_prob_grads(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Derivatives of `log_prob(u)` per row.

        Returns:
            (d/d mu with shape (batch, d), d/d log_std with shape (batch, d))
        """

        z = (u - self.mu) / self.std
        return z / self.std, z**2 - 1
