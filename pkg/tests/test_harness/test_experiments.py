"""Tests for experiments module"""

from unittest.mock import patch

import numpy as np
import pandas as pd
import pytest

from ballbot_nav.dynamics import NEUTRAL_ACTION
from ballbot_nav.harness.controllers import (
    PolicyController,
    load_policy,
    pid_controller,
)
from ballbot_nav.harness.evaluation import evaluate_policy
from ballbot_nav.harness.experiments import (
    horizon_scaling,
    linear_fit,
    pid_comparison,
    terrain_difficulty,
)
from ballbot_nav.rl.trainer import train
from ballbot_nav.runconfig import RunConfig
from ballbot_nav.terrain.field import TerrainParams
from ballbot_nav.utils import EVAL_SEED_RANGE


class Neutral:
    def reset(self):
        pass

    def act(self, observation, state):
        return NEUTRAL_ACTION


@pytest.fixture
def config():
    return RunConfig.from_dict(
        {"rig": {"enabled": False}, "eval": {"horizon": 30, "horizon_episodes": 3}}
    )


def constant_rate_evaluate(
    controller, config, episodes=None, horizon=None, seed_base=None, terrain=None
):
    """Every episode survives and earns 0.02 per step"""

    episodes = episodes or config.eval.episodes
    horizon = horizon or config.eval.horizon
    seed_base = config.eval.seed_base if seed_base is None else seed_base
    seeds = np.arange(seed_base, seed_base + episodes)
    return pd.DataFrame(
        {
            "seed": seeds,
            "reward_sum": 0.02 * horizon,
            "reward_mean": 0.02,
            "length": horizon,
            "velocity_reward": 0.0,
            "failure": False,
        }
    )


class TestLinearFit:
    """Tests for linear_fit"""

    def test_exact_line(self):
        fit = linear_fit([0, 1, 2, 3], [1.0, 3.0, 5.0, 7.0])
        assert fit["slope"] == pytest.approx(2.0)
        assert fit["intercept"] == pytest.approx(1.0)
        assert fit["r_squared"] == pytest.approx(1.0)

    def test_constant(self):
        assert linear_fit([1, 2, 3], [4.0, 4.0, 4.0])["r_squared"] == 1.0

    def test_noisy(self):
        rng = np.random.default_rng(0)
        x = np.arange(50.0)
        fit = linear_fit(x, 0.5 * x + rng.normal(scale=5.0, size=50))
        assert 0 < fit["r_squared"] < 1


class TestHorizonScaling:
    """Tests for horizon_scaling"""

    def test_constant_rate_policy_is_exactly_linear(self, config):
        with patch(
            "ballbot_nav.harness.experiments.evaluate",
            side_effect=constant_rate_evaluate,
        ) as evaluate:
            rows, table, fit = horizon_scaling(Neutral(), config)

        assert table["horizon"].tolist() == [30, 2030, 4030, 8030]
        assert table["episodes"].tolist() == [3, 3, 3, 3]
        assert fit["slope"] == pytest.approx(0.02)
        assert fit["r_squared"] == pytest.approx(1.0)
        assert evaluate.call_count == 4

    def test_fresh_terrains_per_horizon(self, config):
        with patch(
            "ballbot_nav.harness.experiments.evaluate",
            side_effect=constant_rate_evaluate,
        ):
            rows, _, _ = horizon_scaling(Neutral(), config)
        assert rows["seed"].is_unique
        assert rows["seed"].min() == EVAL_SEED_RANGE[0]
        assert len(rows) == 12

    def test_real_run(self, config):
        rows, table, fit = horizon_scaling(
            Neutral(), config, offsets=(0, 10), episodes=2
        )
        assert table["horizon"].tolist() == [30, 40]
        assert set(rows.columns) >= {"seed", "horizon", "reward_sum", "length"}
        assert np.isfinite(fit["slope"])


class TestPidComparison:
    """Tests for pid_comparison"""

    def test_conditions_share_seeds(self, config):
        rows, table = pid_comparison(Neutral(), Neutral(), config, episodes=2)

        assert len(rows) == 8
        assert len(table) == 4
        assert set(zip(table["controller"], table["terrain"])) == {
            ("policy", "flat"),
            ("policy", "uneven"),
            ("pid", "flat"),
            ("pid", "uneven"),
        }
        for terrain in ("flat", "uneven"):
            subset = rows[rows["terrain"] == terrain]
            policy = subset[subset["controller"] == "policy"]
            pid = subset[subset["controller"] == "pid"]
            assert policy["seed"].tolist() == pid["seed"].tolist()
            # identical controllers on identical terrains behave identically
            np.testing.assert_array_equal(
                policy["velocity_reward"].to_numpy(), pid["velocity_reward"].to_numpy()
            )

    def test_summary_columns(self, config):
        _, table = pid_comparison(Neutral(), Neutral(), config, episodes=2)
        for column in (
            "velocity_reward_mean",
            "velocity_reward_std",
            "length_mean",
            "length_std",
        ):
            assert column in table.columns
        assert "reward_sum_mean" not in table.columns

    def test_flat_condition_has_no_relief(self, config):
        with patch(
            "ballbot_nav.harness.experiments.evaluate",
            side_effect=constant_rate_evaluate,
        ) as evaluate:
            pid_comparison(Neutral(), Neutral(), config, episodes=2)
        terrains = [call.kwargs["terrain"] for call in evaluate.call_args_list]
        assert [t.amplitude for t in terrains[:2]] == [0.0, config.terrain.amplitude]


def spread_evaluate(
    controller, config, episodes=None, horizon=None, seed_base=None, terrain=None
):
    """Rougher terrain shortens episodes and scatters the velocity reward"""

    episodes = episodes or config.eval.episodes
    horizon = horizon or config.eval.horizon
    a = terrain.amplitude
    signs = np.where(np.arange(episodes) % 2 == 0, 1.0, -1.0)
    return pd.DataFrame(
        {
            "seed": np.arange(episodes),
            "reward_sum": 0.0,
            "reward_mean": 0.0,
            "length": horizon if a < 0.2 else horizon // 2,
            "velocity_reward": 10.0 + (0.0 if a < 0.2 else 100.0 * signs),
            "failure": a >= 0.2,
        }
    )


class TestTerrainDifficulty:
    """Tests for terrain_difficulty"""

    def test_degradation_flag(self, config):
        with patch(
            "ballbot_nav.harness.experiments.evaluate", side_effect=spread_evaluate
        ) as evaluate:
            table = terrain_difficulty(Neutral(), config, (0.1, 0.35), episodes=4)

        assert evaluate.call_count == 2
        assert table["amplitude"].tolist() == [0.1, 0.35]
        assert table["degraded"].tolist() == [False, True]
        assert table["failures"].tolist() == [0, 4]
        assert table["velocity_reward_std"].iloc[0] == 0.0
        assert table["length_mean"].tolist() == [30.0, 15.0]

    def test_only_amplitude_changes(self, config):
        with patch(
            "ballbot_nav.harness.experiments.evaluate", side_effect=spread_evaluate
        ) as evaluate:
            terrain_difficulty(Neutral(), config, (0.5,), episodes=2)
        terrain = evaluate.call_args.kwargs["terrain"]
        assert terrain.amplitude == 0.5
        assert terrain.scale == config.terrain.scale

    def test_real_run(self, config):
        table = terrain_difficulty(Neutral(), config, (0.0,), episodes=2)
        assert len(table) == 1
        assert not table["degraded"].iloc[0]


@pytest.fixture(scope="module")
def flat_policy(tmp_path_factory):
    """A proprioceptive policy trained on flat ground for one million steps.

    Returns the path of the first checkpoint whose evaluation kept at least
    8 of 10 terrains running to the horizon, or None.
    """

    out = tmp_path_factory.mktemp("flat_policy")
    config = RunConfig.from_dict(
        {
            "rig": {"enabled": False},
            "terrain": {"amplitude": 0.0},
            "ppo": {"total_steps": 1_000_000},
            "eval": {"interval": 5},
        }
    )
    passing = []

    def evaluator(model):
        episodes = evaluate_policy(model, config)
        survived = int((episodes["length"] == config.eval.horizon).sum())
        if survived >= 8 and not passing:
            passing.append(model.save(out / "passing.ckpt"))
        return episodes

    train(config, out, evaluator=evaluator)
    return config, (passing[0] if passing else None)


@pytest.mark.slow
class TestReproduction:
    """Long runs of the full protocols at reduced budgets"""

    def test_pid_degrades_on_default_terrain(self):
        config = RunConfig.from_dict({"rig": {"enabled": False}})
        assert config.terrain.amplitude == TerrainParams().amplitude

        table = terrain_difficulty(
            pid_controller(config), config, (config.terrain.amplitude,), episodes=30
        )
        row = table.iloc[0]
        assert row["length_mean"] < config.eval.horizon
        assert row["failures"] > 0
        assert abs(row["velocity_reward_mean"]) < 0.5 * row["velocity_reward_std"]

    def test_pid_survives_flat_ground(self):
        config = RunConfig.from_dict({"rig": {"enabled": False}})
        table = terrain_difficulty(pid_controller(config), config, (0.0,), episodes=30)
        assert table["failures"].iloc[0] == 0
        assert table["velocity_reward_mean"].iloc[0] > 0

    def test_flat_training_reaches_horizon(self, flat_policy):
        _, path = flat_policy
        assert path is not None

    def test_reward_linear_in_horizon(self, flat_policy):
        config, path = flat_policy
        if path is None:
            pytest.skip("no checkpoint kept 8 of 10 terrains to the horizon")
        policy = PolicyController(load_policy(path, config))

        _, table, fit = horizon_scaling(policy, config, episodes=5)
        assert len(table) == len(config.eval.horizon_offsets)
        assert fit["slope"] > 0
        assert fit["r_squared"] >= 0.9
