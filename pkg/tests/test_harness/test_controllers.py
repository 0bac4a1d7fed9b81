"""Tests for controllers module"""

import numpy as np
import pytest

from ballbot_nav.config import CheckpointError
from ballbot_nav.dynamics import BallbotState
from ballbot_nav.harness.controllers import (
    PolicyController,
    controller_rig,
    load_policy,
    pid_controller,
)
from ballbot_nav.nn import ActorCritic
from ballbot_nav.rl.reward import RewardParams
from ballbot_nav.runconfig import RunConfig
from ballbot_nav.sensors.camera import DepthCameraRig


@pytest.fixture
def config():
    return RunConfig.from_dict({"rig": {"enabled": False}})


class TestPolicyController:
    """Tests for PolicyController"""

    def test_deterministic_uses_mean(self):
        model = ActorCritic(15, seed=1)
        controller = PolicyController(model)
        obs = np.linspace(-1, 1, 15)
        action = controller.act(obs, BallbotState())
        np.testing.assert_allclose(action, model.policy.mean_action(obs)[0])
        np.testing.assert_array_equal(action, controller.act(obs, BallbotState()))

    def test_stochastic_samples(self):
        controller = PolicyController(ActorCritic(15, seed=1), deterministic=False)
        obs = np.zeros(15)
        a = controller.act(obs, BallbotState())
        b = controller.act(obs, BallbotState())
        assert not np.array_equal(a, b)
        assert a.min() > 0 and a.max() < 1

    def test_encode(self):
        assert PolicyController(ActorCritic(15)).encode is None
        depth = PolicyController(ActorCritic(56, encoder_resolution=16))
        assert depth.encode is not None


class TestControllerRig:
    """Tests for controller_rig"""

    def test_pid_runs_blind(self, config):
        rig = controller_rig(pid_controller(config), DepthCameraRig())
        assert not rig.enabled

    def test_policy_rig_follows_encoder(self):
        controller = PolicyController(ActorCritic(56, encoder_resolution=16))
        rig = controller_rig(controller, DepthCameraRig(enabled=False, fov_deg=50.0))
        assert rig.enabled
        assert rig.resolution == 16
        assert rig.fov_deg == 50.0


class TestPidControllerFactory:
    """Tests for pid_controller"""

    def test_drives_along_reward_direction(self, config):
        config = config.replace(reward=RewardParams(direction=(1.0, 0.0)))
        pid = pid_controller(config, target_speed=0.4)
        np.testing.assert_allclose(pid.target_velocity, [0.4, 0.0])
        assert pid.gains == config.pid.gains

    def test_default_speed(self, config):
        pid = pid_controller(config)
        np.testing.assert_allclose(pid.target_velocity, [0.0, 0.5])


class TestLoadPolicy:
    """Tests for load_policy"""

    def test_missing(self, config, tmp_path):
        with pytest.raises(CheckpointError, match="does not exist"):
            load_policy(tmp_path / "nothing.ckpt", config)

    def test_round_trip(self, config, tmp_path):
        model = ActorCritic(15, seed=2)
        path = model.save(tmp_path / "policy.ckpt")
        loaded = load_policy(path, config)
        obs = np.ones((2, 15))
        np.testing.assert_array_equal(
            loaded.policy.mean_action(obs), model.policy.mean_action(obs)
        )

    def test_observation_mode_mismatch(self, tmp_path):
        path = ActorCritic(15).save(tmp_path / "policy.ckpt")
        with pytest.raises(CheckpointError, match="without depth"):
            load_policy(path, RunConfig())
