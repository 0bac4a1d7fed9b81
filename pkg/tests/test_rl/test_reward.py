"""Tests for reward module"""

import math

import numpy as np
import pytest

from ballbot_nav.config import ConfigError
from ballbot_nav.dynamics import BallbotState, NEUTRAL_ACTION
from ballbot_nav.rl.reward import RewardParams, reward, velocity_reward


def tilted(deg: float) -> np.ndarray:
    half = math.radians(deg) / 2
    return np.array([math.cos(half), math.sin(half), 0.0, 0.0])


class TestRewardParams:
    """Tests for RewardParams"""

    def test_defaults(self):
        params = RewardParams()
        assert params.velocity_weight == 0.01
        assert params.survival_weight == 0.02
        assert params.action_weight == 1e-4
        np.testing.assert_array_equal(params.goal, [0.0, 1.0])

    def test_direction_must_be_unit(self):
        with pytest.raises(ConfigError, match="unit vector"):
            RewardParams(direction=(1.0, 1.0))

    def test_direction_must_be_planar(self):
        with pytest.raises(ConfigError, match="two components"):
            RewardParams(direction=(0.0, 0.0, 1.0))

    def test_negative_weight(self):
        with pytest.raises(ConfigError, match="survival_weight"):
            RewardParams(survival_weight=-0.1)

    def test_list_direction_becomes_tuple(self):
        assert RewardParams(direction=[1, 0]).direction == (1.0, 0.0)


class TestReward:
    """Tests for reward and velocity_reward"""

    def test_upright_at_rest_with_neutral_action(self):
        r = reward(BallbotState(), NEUTRAL_ACTION, RewardParams())
        assert r == pytest.approx(0.02 - 1e-4 * 0.75)

    def test_velocity_term_projects_on_goal(self):
        state = BallbotState(velocity=[0.3, 0.5, 0.1])
        assert velocity_reward(state, RewardParams()) == pytest.approx(0.005)
        sideways = RewardParams(direction=(1.0, 0.0))
        assert velocity_reward(state, sideways) == pytest.approx(0.003)

    def test_moving_away_is_negative(self):
        state = BallbotState(velocity=[0.0, -1.0, 0.0])
        assert velocity_reward(state, RewardParams()) == pytest.approx(-0.01)

    def test_failed_state_loses_survival_bonus(self):
        params = RewardParams()
        state = BallbotState(velocity=[0.0, 0.5, 0.0], orientation=tilted(25.0))
        r = reward(state, np.zeros(3), params)
        assert r == pytest.approx(0.005)

    def test_survival_kept_just_below_threshold(self):
        state = BallbotState(orientation=tilted(19.9))
        assert reward(state, np.zeros(3), RewardParams()) == pytest.approx(0.02)

    def test_action_penalty(self):
        params = RewardParams(velocity_weight=0.0, survival_weight=0.0)
        r = reward(BallbotState(), np.ones(3), params)
        assert r == pytest.approx(-3e-4)
