"""Generalisation protocols: horizon scan, PID comparison, terrain difficulty"""

from dataclasses import replace

import numpy as np
import pandas as pd

from ballbot_nav.config import logger
from ballbot_nav.harness.evaluation import evaluate, summarize
from ballbot_nav.rl.rollout import Controller
from ballbot_nav.runconfig import RunConfig


def linear_fit(x, y) -> dict:
    """Least-squares line through (x, y) with its coefficient of determination"""

    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    ss_res = float(residual @ residual)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0:
        r_squared = 1.0 if ss_res == 0 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return {
        "slope": float(slope),
        "intercept": float(intercept),
        "r_squared": r_squared,
    }


def horizon_scaling(
    controller: Controller,
    config: RunConfig,
    offsets: tuple[int, ...] | None = None,
    episodes: int | None = None,
) -> tuple[pd.DataFrame, pd.DataFrame, dict]:
    """Evaluate at horizons `config.eval.horizon + offset` on fresh terrains.

    Each horizon gets its own block of `episodes` terrain seeds, so no
    terrain is reused between horizons.

    Args:
        controller: the policy to test
        config: run configuration
        offsets: extra steps per horizon, default `config.eval.horizon_offsets`
        episodes: terrains per horizon, default `config.eval.horizon_episodes`

    Returns:
        The per-episode rows (with a `horizon` column), one summary row per
        horizon, and the linear fit of mean reward against horizon.
    """

    offsets = offsets or config.eval.horizon_offsets
    episodes = episodes or config.eval.horizon_episodes

    frames = []
    for k, offset in enumerate(offsets):
        horizon = config.eval.horizon + offset
        df = evaluate(
            controller,
            config,
            episodes=episodes,
            horizon=horizon,
            seed_base=config.eval.seed_base + k * episodes,
        )
        frames.append(df.assign(horizon=horizon))
    rows = pd.concat(frames, ignore_index=True)

    table = summarize(rows, by="horizon")
    fit = linear_fit(table["horizon"], table["reward_sum_mean"])
    logger.info(
        f"Reward grows by {fit['slope']:.5f} per step of horizon "
        f"(R^2 = {fit['r_squared']:.3f})"
    )
    return rows, table, fit


def pid_comparison(
    policy: Controller,
    pid: Controller,
    config: RunConfig,
    episodes: int | None = None,
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """Policy and PID on flat and on uneven terrain, velocity reward only.

    Both controllers see the same terrain seeds and initial tilts in each
    condition; rows carry the seed for paired comparisons.

    Args:
        policy: the learned controller
        pid: the cascaded PID
        config: run configuration; `config.terrain` is the uneven condition
        episodes: terrains per condition, default `config.eval.comparison_episodes`

    Returns:
        Per-episode rows with `controller` and `terrain` columns, and one
        summary row per (controller, terrain) pair.
    """

    episodes = episodes or config.eval.comparison_episodes
    conditions = {
        "flat": replace(config.terrain, amplitude=0.0),
        "uneven": config.terrain,
    }
    frames = []
    for name, controller in (("policy", policy), ("pid", pid)):
        for terrain_name, terrain in conditions.items():
            df = evaluate(controller, config, episodes=episodes, terrain=terrain)
            frames.append(df.assign(controller=name, terrain=terrain_name))
    rows = pd.concat(frames, ignore_index=True)

    columns = ["controller", "terrain", "velocity_reward", "length", "failure"]
    table = summarize(rows[columns], by=["controller", "terrain"])
    return rows, table


def terrain_difficulty(
    controller: Controller,
    config: RunConfig,
    amplitudes: tuple[float, ...],
    episodes: int | None = None,
) -> pd.DataFrame:
    """How a fixed controller degrades as the terrain relief grows.

    Used to calibrate `TerrainParams.amplitude`: the default amplitude should
    leave the PID with failures, episodes shorter than the horizon and a
    velocity reward whose mean is small against its spread.

    Args:
        controller: usually the tuned PID
        config: run configuration; `config.terrain` supplies everything but
            the amplitude
        amplitudes: relief heights to test, metres
        episodes: terrains per amplitude, default `config.eval.comparison_episodes`

    Returns:
        One row per amplitude with the velocity reward and length statistics,
        the failure count and a `degraded` flag.
    """

    episodes = episodes or config.eval.comparison_episodes
    rows = []
    for amplitude in amplitudes:
        terrain = replace(config.terrain, amplitude=float(amplitude))
        df = evaluate(controller, config, episodes=episodes, terrain=terrain)
        mean = float(df["velocity_reward"].mean())
        std = float(df["velocity_reward"].std(ddof=0))
        length = float(df["length"].mean())
        failures = int(df["failure"].sum())
        degraded = (
            length < config.eval.horizon and failures > 0 and abs(mean) < 0.5 * std
        )
        logger.info(
            f"Amplitude {amplitude:.3f} m: mean length {length:.0f}, "
            f"{failures} failures, velocity reward {mean:.3f} +- {std:.3f}"
        )
        rows.append(
            {
                "amplitude": float(amplitude),
                "velocity_reward_mean": mean,
                "velocity_reward_std": std,
                "length_mean": length,
                "failures": failures,
                "degraded": degraded,
            }
        )
    return pd.DataFrame(rows)
