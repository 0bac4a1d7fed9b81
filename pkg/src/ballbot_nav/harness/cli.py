"""Command line entry point `ballbot-nav`.

Every subcommand reads an optional YAML run config (`--config`), applies the
`--seed` override and writes its CSV tables into `--out`. These options go
either before or after the subcommand; after it wins when both are given.

```
ballbot-nav train --config run.yaml --seed 1 --out runs/seed1
ballbot-nav eval --checkpoint runs/seed1/checkpoints/latest.ckpt --out runs/seed1
ballbot-nav --out runs/pid pid-tune
ballbot-nav terrain-difficulty --amplitudes 0.15 0.25 0.35 --episodes 30
ballbot-nav gen-terrain --seed 7 --extent 20 --resolution 200 --out terrain
```
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import pandas as pd

from ballbot_nav.config import (
    AlignmentError,
    CheckpointError,
    ConfigError,
    InsufficientDataError,
    ObservationError,
    PenetrationError,
    ShapeError,
    SimulationDivergedError,
    TuningFailedError,
    UpdateAbortedError,
    UsageError,
    logger,
)
from ballbot_nav.harness.controllers import (
    PolicyController,
    load_policy,
    pid_controller,
)
from ballbot_nav.harness.evaluation import evaluate, summarize, write_episodes
from ballbot_nav.harness.experiments import (
    horizon_scaling,
    pid_comparison,
    terrain_difficulty,
)
from ballbot_nav.harness.trajectory import export_trajectory
from ballbot_nav.pid.tuning import tune_flat, write_tuning_report
from ballbot_nav.rl.pretrain import pretrain_encoder
from ballbot_nav.rl.trainer import train
from ballbot_nav.runconfig import RunConfig, load_config, save_config
from ballbot_nav.terrain.export import export_csv, export_heightmap
from ballbot_nav.terrain.field import generate_terrain
from ballbot_nav.utils import write_versioned_csv

PACKAGE_ERRORS = (
    AlignmentError,
    CheckpointError,
    ConfigError,
    InsufficientDataError,
    ObservationError,
    PenetrationError,
    ShapeError,
    SimulationDivergedError,
    TuningFailedError,
    UpdateAbortedError,
    UsageError,
    OSError,
)


def _common(suppress: bool = False) -> argparse.ArgumentParser:
    """Options accepted both before and after the subcommand.

    The subcommand copies default to SUPPRESS so that they only override the
    top-level value when given.
    """

    def default(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        type=Path,
        default=default(None),
        help="YAML run config; defaults apply when omitted",
    )
    common.add_argument(
        "--seed",
        type=int,
        default=default(None),
        help="run seed overriding the config (terrain seed for gen-terrain)",
    )
    common.add_argument(
        "--out",
        type=Path,
        default=default(Path(".")),
        help="output folder (default: .)",
    )
    common.add_argument(
        "--verbose",
        action="store_true",
        default=default(False),
        help="log at DEBUG level",
    )
    return common


def _checkpoint_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--checkpoint", type=Path, help="actor-critic checkpoint")
    parser.add_argument(
        "--stochastic",
        action="store_true",
        help="sample actions instead of acting with the policy mean",
    )


def build_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)
    parser = argparse.ArgumentParser(
        prog="ballbot-nav",
        parents=[_common()],
        description="Ballbot navigation on uneven terrain: training, "
        "evaluation and the PID baseline",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser(
        "train", parents=[common], help="train a policy with PPO"
    )
    p.add_argument(
        "--fresh",
        action="store_true",
        help="ignore an existing checkpoint in --out and start from scratch",
    )

    p = commands.add_parser(
        "eval", parents=[common], help="evaluate a policy on held-out terrains"
    )
    _checkpoint_args(p)
    p.add_argument("--episodes", type=int, help="number of terrains")
    p.add_argument("--horizon", type=int, help="episode length cap, steps")

    p = commands.add_parser(
        "pid-tune", parents=[common], help="grid-search PID gains on flat ground"
    )

    p = commands.add_parser(
        "pid-compare",
        parents=[common],
        help="policy against PID on flat and uneven terrain",
    )
    _checkpoint_args(p)
    p.add_argument("--episodes", type=int, help="terrains per condition")

    p = commands.add_parser(
        "terrain-difficulty",
        parents=[common],
        help="PID degradation against terrain amplitude",
    )
    p.add_argument("--episodes", type=int, help="terrains per amplitude")
    p.add_argument(
        "--amplitudes",
        type=float,
        nargs="+",
        help="relief heights to test, m (default: the config amplitude)",
    )

    p = commands.add_parser(
        "horizon-scan",
        parents=[common],
        help="evaluation reward against episode horizon",
    )
    _checkpoint_args(p)
    p.add_argument("--episodes", type=int, help="terrains per horizon")
    p.add_argument(
        "--offsets",
        type=int,
        nargs="+",
        help="steps added to the evaluation horizon, one scan point each",
    )

    p = commands.add_parser(
        "export-trajectory",
        parents=[common],
        help="record one episode and its terrain",
    )
    _checkpoint_args(p)
    p.add_argument(
        "--pid", action="store_true", help="drive with the PID instead of a policy"
    )
    p.add_argument(
        "--terrain-seed",
        type=int,
        help="evaluation terrain seed (default: eval.seed_base)",
    )
    p.add_argument("--horizon", type=int, help="episode length cap, steps")
    p.add_argument("--extent", type=float, default=20.0, help="terrain side, m")
    p.add_argument("--resolution", type=int, default=200, help="samples per side")

    p = commands.add_parser(
        "pretrain-encoder",
        parents=[common],
        help="pretrain the depth encoder on PID-driven episodes",
    )
    p.add_argument(
        "--output",
        type=Path,
        help="encoder checkpoint (default: encoder.checkpoint or OUT/encoder.ckpt)",
    )

    p = commands.add_parser(
        "gen-terrain", parents=[common], help="export a terrain raster"
    )
    p.add_argument("--extent", type=float, default=20.0, help="terrain side, m")
    p.add_argument("--resolution", type=int, default=200, help="samples per side")
    p.add_argument(
        "--png", action="store_true", help="also write a 16-bit heightmap PNG"
    )
    return parser


def _policy(args, config: RunConfig) -> PolicyController:
    if args.checkpoint is None:
        raise UsageError(f"{args.command} needs --checkpoint PATH")
    model = load_policy(args.checkpoint, config)
    return PolicyController(model, deterministic=not args.stochastic, seed=config.seed)


def cmd_train(args, config: RunConfig) -> None:
    save_config(config, args.out / "config.yaml")
    train(config, args.out, resume=not args.fresh)


def cmd_eval(args, config: RunConfig) -> None:
    controller = _policy(args, config)
    episodes = evaluate(controller, config, args.episodes, args.horizon)
    write_episodes(episodes, args.out / "eval_episodes.csv", config.hash())
    write_versioned_csv(
        summarize(episodes), args.out / "eval_summary.csv", "summary", config.hash()
    )


def cmd_pid_tune(args, config: RunConfig) -> None:
    report_path = args.out / "pid_tuning.csv"
    try:
        gains, report = tune_flat(
            config.pid, config.physics, config.reward, config.seed
        )
    except TuningFailedError as e:
        if e.report is not None:
            write_tuning_report(e.report, report_path, config.hash())
        raise
    write_tuning_report(report, report_path, config.hash())
    tuned = config.replace(pid=replace(config.pid, gains=gains))
    path = save_config(tuned, args.out / "pid_tuned.yaml")
    logger.info(f"Config with the tuned gains written to {path}")


def cmd_pid_compare(args, config: RunConfig) -> None:
    policy = _policy(args, config)
    rows, table = pid_comparison(policy, pid_controller(config), config, args.episodes)
    write_versioned_csv(rows, args.out / "comparison.csv", "comparison", config.hash())
    write_versioned_csv(
        table, args.out / "comparison_summary.csv", "summary", config.hash()
    )


def cmd_terrain_difficulty(args, config: RunConfig) -> None:
    amplitudes = tuple(args.amplitudes or (config.terrain.amplitude,))
    pid = pid_controller(config)
    table = terrain_difficulty(pid, config, amplitudes, args.episodes)
    write_versioned_csv(
        table, args.out / "terrain_difficulty.csv", "difficulty", config.hash()
    )


def cmd_horizon_scan(args, config: RunConfig) -> None:
    policy = _policy(args, config)
    offsets = tuple(args.offsets) if args.offsets else None
    rows, table, fit = horizon_scaling(policy, config, offsets, args.episodes)
    cfg_hash = config.hash()
    write_versioned_csv(rows, args.out / "horizon_episodes.csv", "horizon", cfg_hash)
    write_versioned_csv(table, args.out / "horizon_summary.csv", "summary", cfg_hash)
    write_versioned_csv(
        pd.DataFrame([fit]), args.out / "horizon_fit.csv", "fit", cfg_hash
    )


def cmd_export_trajectory(args, config: RunConfig) -> None:
    controller = pid_controller(config) if args.pid else _policy(args, config)
    seed = config.eval.seed_base if args.terrain_seed is None else args.terrain_seed
    export_trajectory(
        controller,
        config,
        seed,
        args.out,
        horizon=args.horizon,
        extent=args.extent,
        resolution=args.resolution,
    )


def cmd_pretrain_encoder(args, config: RunConfig) -> None:
    out_path = args.output or config.encoder.checkpoint or args.out / "encoder.ckpt"
    _, history = pretrain_encoder(config, pid_controller(config), out_path)
    write_versioned_csv(
        history, args.out / "encoder_history.csv", "encoder-history", config.hash()
    )
    logger.info(f"Encoder written to {out_path}")


def cmd_gen_terrain(args, config: RunConfig) -> None:
    params = config.terrain
    if args.seed is not None:
        params = params.with_seed(args.seed)
    field = generate_terrain(params)
    export_csv(
        field,
        args.out / f"terrain_{params.seed}.csv",
        args.extent,
        args.resolution,
        config.hash(),
    )
    if args.png:
        export_heightmap(
            field, args.out / f"terrain_{params.seed}.png", args.extent, args.resolution
        )


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "pid-tune": cmd_pid_tune,
    "pid-compare": cmd_pid_compare,
    "terrain-difficulty": cmd_terrain_difficulty,
    "horizon-scan": cmd_horizon_scan,
    "export-trajectory": cmd_export_trajectory,
    "pretrain-encoder": cmd_pretrain_encoder,
    "gen-terrain": cmd_gen_terrain,
}


def main(argv: list[str] | None = None) -> int:
    """Run the command line. Returns 0 on success and 1 on any package error.

    Argument errors exit with status 2 through argparse.
    """

    args = build_parser().parse_args(argv)
    logger.setLevel(logging.DEBUG if args.verbose else logging.INFO)

    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = config.with_seed(args.seed)
        COMMANDS[args.command](args, config)
    except PACKAGE_ERRORS as e:
        logger.error(str(e))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
