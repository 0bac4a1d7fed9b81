"""Tests for optim module"""

import numpy as np
import pytest

from ballbot_nav import nn
from ballbot_nav.config import ShapeError


@pytest.fixture
def store():
    store = nn.ParameterStore(dtype=np.float64)
    store.add("w", np.array([1.0, -2.0]))
    store.add("b", np.array([0.5]))
    return store


def test_clip_grad_norm(store):
    store["w"].grad[...] = [3.0, 0.0]
    store["b"].grad[...] = [4.0]

    norm = nn.clip_grad_norm(store.trainable(), 0.5)

    assert norm == pytest.approx(5.0)
    clipped = np.concatenate([p.grad for p in store])
    assert np.linalg.norm(clipped) == pytest.approx(0.5, rel=1e-5)
    np.testing.assert_allclose(clipped / np.linalg.norm(clipped), [0.6, 0.0, 0.8])


def test_clip_leaves_small_gradients(store):
    store["w"].grad[...] = [0.1, 0.1]
    nn.clip_grad_norm(store.trainable(), 0.5)
    np.testing.assert_array_equal(store["w"].grad, [0.1, 0.1])


class TestAdam:
    """Tests for Adam"""

    def test_first_step_moves_by_lr(self, store):
        opt = nn.Adam(store.trainable(), lr=0.01, max_grad_norm=None)
        store["w"].grad[...] = [0.2, -3.0]
        store["b"].grad[...] = [0.0]
        opt.step()

        np.testing.assert_allclose(store["w"].value, [0.99, -1.99], atol=1e-4)
        np.testing.assert_array_equal(store["b"].value, [0.5])

    def test_weight_decay_shrinks_weights(self, store):
        opt = nn.Adam(store.trainable(), lr=0.01, weight_decay=0.01)
        opt.step()
        assert store["w"].value[0] < 1.0
        assert store["w"].value[1] > -2.0

    def test_minimises_quadratic(self, store):
        opt = nn.Adam(store.trainable(), lr=0.01, max_grad_norm=None)
        for _ in range(3000):
            store.zero_grad()
            for p in store:
                p.grad[...] = 2 * (p.value - 3.0)
            opt.step()
        for p in store:
            np.testing.assert_allclose(p.value, 3.0, atol=0.05)

    def test_skips_frozen_parameters(self, store):
        store.freeze("b")
        opt = nn.Adam(store.trainable(), lr=0.1)
        store["b"].grad[...] = 1.0
        opt.step()
        assert store["b"].value[0] == 0.5
        assert list(opt.m) == ["w"]

    def test_state_dict_round_trip(self, store):
        opt = nn.Adam(store.trainable(), lr=0.01)
        store["w"].grad[...] = [0.3, 0.4]
        opt.step()
        state = opt.state_dict()
        assert set(state) == {"adam.t", "adam.m.w", "adam.v.w", "adam.m.b", "adam.v.b"}

        fresh = nn.Adam(store.trainable(), lr=0.01)
        fresh.load_state_dict(state)
        assert fresh.t == 1
        np.testing.assert_array_equal(fresh.m["w"], opt.m["w"])
        np.testing.assert_array_equal(fresh.v["w"], opt.v["w"])

    def test_load_missing_moment(self, store):
        opt = nn.Adam(store.trainable())
        state = opt.state_dict()
        del state["adam.v.b"]
        with pytest.raises(ShapeError, match="adam.v.b"):
            opt.load_state_dict(state)
