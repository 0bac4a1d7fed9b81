"""Tests for distributions module"""

import math

import numpy as np
import pytest

from ballbot_nav.nn import SquashedGaussian
from ballbot_nav.nn.gradcheck import numerical_gradient


@pytest.fixture
def dist():
    mu = np.array([[0.3, -1.0, 2.0], [0.0, 0.5, -0.2]])
    return SquashedGaussian(mu, np.log([0.7, 0.3, 1.2]))


def squashed_density(a, mu, sigma):
    """p(a) for a = sigmoid(u), u ~ N(mu, sigma^2), written out directly"""

    u = np.log(a / (1 - a))
    gauss = np.exp(-0.5 * ((u - mu) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    return gauss / (a * (1 - a))


def test_density_integrates_to_one():
    one_d = SquashedGaussian(np.array([[0.3]]), np.log([0.7]))
    a = np.linspace(1e-6, 1 - 1e-6, 200_001)
    density = np.exp(one_d.log_prob_action(a[:, None]))
    integral = np.sum(0.5 * (density[1:] + density[:-1]) * np.diff(a))
    assert integral == pytest.approx(1.0, abs=1e-4)


def test_log_prob_matches_direct_density(dist):
    a = np.array([[0.2, 0.5, 0.9], [0.6, 0.01, 0.4]])
    expected = np.log(squashed_density(a, dist.mu, np.exp(dist.log_std))).sum(axis=1)
    np.testing.assert_allclose(dist.log_prob_action(a), expected, rtol=1e-10)


def test_sample(dist):
    rng = np.random.default_rng(0)
    action, u = dist.sample(rng)
    assert action.shape == u.shape == (2, 3)
    assert np.all((action > 0) & (action < 1))
    np.testing.assert_allclose(np.log(action / (1 - action)), u, rtol=1e-9, atol=1e-9)


def test_sample_statistics():
    rng = np.random.default_rng(1)
    dist = SquashedGaussian(np.zeros((20_000, 1)), np.log([0.5]))
    _, u = dist.sample(rng)
    assert u.mean() == pytest.approx(0.0, abs=0.02)
    assert u.std() == pytest.approx(0.5, abs=0.02)


def test_mode():
    dist = SquashedGaussian(np.zeros((1, 3)), np.zeros(3))
    np.testing.assert_array_equal(dist.mode(), np.full((1, 3), 0.5))


def test_entropy(dist):
    expected = np.sum(np.log([0.7, 0.3, 1.2]) + 0.5 * (1 + math.log(2 * math.pi)))
    np.testing.assert_allclose(dist.entropy(), [expected, expected])


def test_log_prob_grads(dist):
    u = np.array([[0.1, -0.4, 1.5], [0.3, 0.2, -1.0]])
    d_mu, d_log_std = dist.log_prob_grads(u)

    for row in range(2):
        mu = dist.mu.copy()
        log_std = dist.log_std.copy()

        def loss():
            return float(SquashedGaussian(mu, log_std).log_prob(u)[row])

        numeric_mu = numerical_gradient(loss, mu)[row]
        numeric_log_std = numerical_gradient(loss, log_std)
        tol = {"rtol": 1e-6, "atol": 1e-7}
        np.testing.assert_allclose(numeric_mu, d_mu[row], **tol)
        np.testing.assert_allclose(numeric_log_std, d_log_std[row], **tol)
