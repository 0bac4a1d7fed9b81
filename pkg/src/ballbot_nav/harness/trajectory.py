"""Single-episode trajectories for top-down plots"""

from pathlib import Path

import pandas as pd

from ballbot_nav.config import logger
from ballbot_nav.dynamics.state import tilt_angle
from ballbot_nav.harness.evaluation import evaluation_env
from ballbot_nav.rl.rollout import Controller, EpisodeResult, run_episode
from ballbot_nav.runconfig import RunConfig
from ballbot_nav.terrain.export import export_csv
from ballbot_nav.terrain.field import generate_terrain
from ballbot_nav.utils import EVAL_SEED_RANGE, check_seed_range, write_versioned_csv

TRAJECTORY_COLUMNS = [
    "t",
    "x",
    "y",
    "z",
    "qw",
    "qx",
    "qy",
    "qz",
    "tilt",
    "a1",
    "a2",
    "a3",
    "reward",
]


def record_trajectory(
    controller: Controller,
    config: RunConfig,
    terrain_seed: int,
    horizon: int | None = None,
) -> tuple[pd.DataFrame, EpisodeResult]:
    """Run one evaluation episode and keep every step.

    The episode matches the first episode `evaluate` runs from
    `seed_base=terrain_seed`, so the reward column sums to the reward that
    evaluation reports.

    Returns:
        One row per step (`TRAJECTORY_COLUMNS`) and the episode summary.
    """

    check_seed_range(terrain_seed, EVAL_SEED_RANGE)
    horizon = horizon or config.eval.horizon
    env = evaluation_env(controller, config, horizon)
    rows = []

    def record(env, action, outcome):
        state = outcome.state
        rows.append(
            [
                state.time,
                *state.position,
                *state.orientation,
                tilt_angle(state),
                *env.last_action,
                outcome.reward,
            ]
        )

    result = run_episode(env, controller, terrain_seed=terrain_seed, on_step=record)
    return pd.DataFrame(rows, columns=TRAJECTORY_COLUMNS), result


def export_trajectory(
    controller: Controller,
    config: RunConfig,
    terrain_seed: int,
    out_dir: str | Path,
    horizon: int | None = None,
    extent: float = 20.0,
    resolution: int = 200,
) -> tuple[Path, Path]:
    """Write a trajectory and the terrain it was driven on.

    Args:
        controller: policy or PID
        config: run configuration
        terrain_seed: an evaluation terrain seed
        out_dir: output folder
        horizon: episode length cap, default `config.eval.horizon`
        extent: side of the exported terrain square, metres
        resolution: terrain samples per side

    Returns:
        Paths of `trajectory_<seed>.csv` and `terrain_<seed>.csv`.
    """

    out_dir = Path(out_dir)
    df, result = record_trajectory(controller, config, terrain_seed, horizon)
    cfg_hash = config.hash()
    trajectory_path = write_versioned_csv(
        df, out_dir / f"trajectory_{terrain_seed}.csv", "trajectory", cfg_hash
    )

    terrain = generate_terrain(config.terrain.with_seed(terrain_seed))
    terrain_path = export_csv(
        terrain, out_dir / f"terrain_{terrain_seed}.csv", extent, resolution, cfg_hash
    )
    logger.info(
        f"Trajectory of {result.length} steps on terrain {terrain_seed} "
        f"written to {trajectory_path}"
    )
    return trajectory_path, terrain_path
