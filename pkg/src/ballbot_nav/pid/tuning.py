"""Grid search of PID gains on flat ground"""

from dataclasses import replace
from itertools import product
from pathlib import Path

import numpy as np
import pandas as pd

from ballbot_nav.config import TuningFailedError, logger
from ballbot_nav.dynamics.params import PhysicalParams
from ballbot_nav.pid.controller import CascadedPid
from ballbot_nav.pid.gains import PidConfig, PidGains
from ballbot_nav.rl.env import BallbotEnv
from ballbot_nav.rl.reward import RewardParams
from ballbot_nav.rl.rollout import run_episode
from ballbot_nav.sensors.camera import DepthCameraRig
from ballbot_nav.terrain.field import TerrainParams
from ballbot_nav.utils import write_versioned_csv

REPORT_COLUMNS = [
    "inner_kp",
    "inner_kd",
    "outer_kp",
    "survival_rate",
    "velocity_reward_mean",
    "length_mean",
]


def flat_trial(
    gains: PidGains,
    config: PidConfig,
    physics: PhysicalParams,
    reward_params: RewardParams,
    seed: int,
) -> dict:
    """Run one gain set for `config.tuning_episodes` flat episodes"""

    env = BallbotEnv(
        TerrainParams(amplitude=0.0),
        physics,
        DepthCameraRig(enabled=False),
        reward_params,
        horizon=config.tuning_horizon,
        seed=seed,
    )
    controller = CascadedPid(
        gains, physics, target_velocity=config.target_speed * reward_params.goal
    )
    results = [run_episode(env, controller) for _ in range(config.tuning_episodes)]
    survived = [not r.failure and r.length == config.tuning_horizon for r in results]
    return {
        "inner_kp": gains.inner_kp,
        "inner_kd": gains.inner_kd,
        "outer_kp": gains.outer_kp,
        "survival_rate": float(np.mean(survived)),
        "velocity_reward_mean": float(np.mean([r.velocity_reward for r in results])),
        "length_mean": float(np.mean([r.length for r in results])),
    }


def tune_flat(
    config: PidConfig,
    physics: PhysicalParams = PhysicalParams(),
    reward_params: RewardParams = RewardParams(),
    seed: int = 0,
) -> tuple[PidGains, pd.DataFrame]:
    """Pick the gains that always survive on flat ground and move fastest towards g.

    Every combination of the three grids in `config` is run for the same
    `config.tuning_episodes` flat episodes (same initial perturbations).
    Among the candidates surviving every episode, the one with the largest
    mean velocity reward wins; ties go to the first in grid order.

    Args:
        config: grids, episode count and horizon; other gains come from `config.gains`
        physics: physical parameters
        reward_params: reward direction and velocity weight
        seed: seed of the episode perturbations

    Returns:
        The selected gains and the search report, one row per candidate.

    Raises:
        TuningFailedError: if no candidate survives every episode
    """

    rows = []
    for kp, kd, outer_kp in product(
        config.inner_kp_grid, config.inner_kd_grid, config.outer_kp_grid
    ):
        gains = replace(config.gains, inner_kp=kp, inner_kd=kd, outer_kp=outer_kp)
        row = flat_trial(gains, config, physics, reward_params, seed)
        logger.debug(f"Gains {kp}/{kd}/{outer_kp}: survival {row['survival_rate']}")
        rows.append(row)
    report = pd.DataFrame(rows, columns=REPORT_COLUMNS)

    survivors = report[report["survival_rate"] == 1.0]
    if survivors.empty:
        raise TuningFailedError(
            f"None of the {len(report)} gain sets survived all "
            f"{config.tuning_episodes} flat episodes",
            report,
        )

    best = survivors.loc[survivors["velocity_reward_mean"].idxmax()]
    gains = replace(
        config.gains,
        inner_kp=float(best["inner_kp"]),
        inner_kd=float(best["inner_kd"]),
        outer_kp=float(best["outer_kp"]),
    )
    logger.info(
        f"Tuned gains inner_kp={gains.inner_kp}, inner_kd={gains.inner_kd}, "
        f"outer_kp={gains.outer_kp}: velocity reward "
        f"{best['velocity_reward_mean']:.3f} over {config.tuning_episodes} episodes"
    )
    return gains, report


def write_tuning_report(
    report: pd.DataFrame, path: str | Path, cfg_hash: str = "none"
) -> Path:
    return write_versioned_csv(report, path, "pid-tuning", cfg_hash)
