"""Utility functions"""

import hashlib
import json
from pathlib import Path

import pandas as pd

from ballbot_nav.config import ConfigError

CSV_FORMAT_VERSION = 1

# terrain seeds used for training and for evaluation never overlap
TRAIN_SEED_RANGE = (0, 1_000_000_000)
EVAL_SEED_RANGE = (1_000_000_000, 2_000_000_000)


def config_hash(payload: dict) -> str:
    """Return a short stable hash of a JSON-serialisable dictionary.

    Args:
        payload: dictionary to hash. Keys are sorted before hashing.

    Returns:
        The first 12 hex characters of the sha256 digest.
    """

    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def check_seed_range(seed: int, seed_range: tuple[int, int]) -> int:
    """Check that a terrain seed lies in the half-open range `[low, high)`.

    Args:
        seed: the seed to check
        seed_range: the allowed range

    Returns:
        The seed, unchanged.
    """

    low, high = seed_range
    if not low <= seed < high:
        raise ConfigError(f"Seed {seed} is outside the allowed range [{low}, {high})")
    return seed


def write_versioned_csv(
    df: pd.DataFrame, path: str | Path, kind: str, cfg_hash: str = "none"
) -> Path:
    """Write a DataFrame as CSV preceded by a one-line version header.

    The header reads `# ballbot-nav <kind> format=<version> config=<hash>`.

    Args:
        df: the data to write
        path: output path. Parent folders are created.
        kind: name of the table schema, e.g. "metrics"
        cfg_hash: hash of the run config that produced the data

    Returns:
        The path written to.
    """

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(
            f"# ballbot-nav {kind} format={CSV_FORMAT_VERSION} config={cfg_hash}\n"
        )
        df.to_csv(f, index=False, float_format="%.10g", lineterminator="\n")

    return path


def read_versioned_csv(path: str | Path) -> pd.DataFrame:
    """Read a CSV written by `write_versioned_csv`, skipping the header line"""

    return pd.read_csv(path, comment="#")
