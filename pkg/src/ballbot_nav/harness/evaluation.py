"""Policy evaluation on held-out terrains"""

from pathlib import Path

import pandas as pd

from ballbot_nav.config import logger
from ballbot_nav.harness.controllers import PolicyController, controller_rig
from ballbot_nav.nn.networks import ActorCritic
from ballbot_nav.rl.env import BallbotEnv
from ballbot_nav.rl.rollout import Controller, run_episode
from ballbot_nav.runconfig import RunConfig
from ballbot_nav.terrain.field import TerrainParams
from ballbot_nav.utils import EVAL_SEED_RANGE, check_seed_range, write_versioned_csv

EPISODE_COLUMNS = [
    "seed",
    "reward_sum",
    "reward_mean",
    "length",
    "velocity_reward",
    "failure",
]

SUMMARY_COLUMNS = ["reward_sum", "reward_mean", "length", "velocity_reward"]


def evaluation_env(
    controller: Controller,
    config: RunConfig,
    horizon: int,
    terrain: TerrainParams | None = None,
) -> BallbotEnv:
    """Environment over evaluation seeds set up for `controller`"""

    return BallbotEnv(
        terrain or config.terrain,
        config.physics,
        controller_rig(controller, config.rig),
        config.reward,
        horizon=horizon,
        initial_tilt_deg=config.ppo.initial_tilt_deg,
        seed=config.eval.seed_base,
        encode=getattr(controller, "encode", None),
        seed_range=EVAL_SEED_RANGE,
    )


def evaluate(
    controller: Controller,
    config: RunConfig,
    episodes: int | None = None,
    horizon: int | None = None,
    seed_base: int | None = None,
    terrain: TerrainParams | None = None,
) -> pd.DataFrame:
    """Run a controller once on each of `episodes` consecutive evaluation terrains.

    Terrain seeds are `seed_base, seed_base + 1, ...` and must lie in the
    evaluation range, which training never draws from. Results only depend
    on the arguments, so two controllers evaluated with the same arguments see
    the same terrains and the same initial tilts.

    Args:
        controller: policy or PID
        config: run configuration
        episodes: number of terrains, default `config.eval.episodes`
        horizon: episode length cap, default `config.eval.horizon`
        seed_base: first terrain seed, default `config.eval.seed_base`
        terrain: terrain distribution, default `config.terrain`

    Returns:
        One row per episode, sorted by seed.
    """

    episodes = episodes or config.eval.episodes
    horizon = horizon or config.eval.horizon
    seed_base = config.eval.seed_base if seed_base is None else seed_base
    seeds = [check_seed_range(seed_base + i, EVAL_SEED_RANGE) for i in range(episodes)]

    env = evaluation_env(controller, config, horizon, terrain)
    rows = []
    for seed in seeds:
        result = run_episode(env, controller, terrain_seed=seed)
        rows.append(
            {
                "seed": result.seed,
                "reward_sum": result.reward_sum,
                "reward_mean": result.reward_mean,
                "length": result.length,
                "velocity_reward": result.velocity_reward,
                "failure": result.failure,
            }
        )

    df = pd.DataFrame(rows, columns=EPISODE_COLUMNS).sort_values("seed")
    logger.info(
        f"Evaluated {episodes} episodes: mean reward {df['reward_sum'].mean():.3f}, "
        f"mean length {df['length'].mean():.0f}, {int(df['failure'].sum())} failures"
    )
    return df.reset_index(drop=True)


def evaluate_policy(model: ActorCritic, config: RunConfig) -> pd.DataFrame:
    """The training-time evaluation hook"""

    controller = PolicyController(
        model, deterministic=config.eval.deterministic, seed=config.seed
    )
    return evaluate(controller, config)


def summarize(
    episodes: pd.DataFrame, by: str | list[str] | None = None
) -> pd.DataFrame:
    """Mean, median and std of the per-episode columns.

    Args:
        episodes: rows as returned by `evaluate`
        by: optional grouping columns

    Returns:
        Columns like `reward_sum_mean`, `reward_sum_median`, `reward_sum_std`,
        plus `episodes` and `failures`; one row, or one per group.
    """

    columns = [c for c in SUMMARY_COLUMNS if c in episodes.columns]

    def stats(df: pd.DataFrame) -> dict:
        out = {}
        for c in columns:
            out[f"{c}_mean"] = df[c].mean()
            out[f"{c}_median"] = df[c].median()
            out[f"{c}_std"] = df[c].std(ddof=0)
        out["episodes"] = len(df)
        out["failures"] = int(df["failure"].sum()) if "failure" in df else 0
        return out

    if by is None:
        return pd.DataFrame([stats(episodes)])
    keys = [by] if isinstance(by, str) else list(by)
    rows = [
        {**dict(zip(keys, values)), **stats(group)}
        for values, group in episodes.groupby(keys, sort=True)
    ]
    return pd.DataFrame(rows)


def write_episodes(
    episodes: pd.DataFrame, path: str | Path, cfg_hash: str = "none"
) -> Path:
    return write_versioned_csv(episodes, path, "episodes", cfg_hash)
