"""Rasterisation and export of terrain fields for plotting."""

from pathlib import Path

import numpy as np
import pandas as pd
from PIL import Image

from ballbot_nav.config import ConfigError, logger
from ballbot_nav.terrain.field import TerrainField
from ballbot_nav.utils import write_versioned_csv


def rasterize(
    terrain: TerrainField, extent: float, resolution: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample the terrain on a square grid centred on the origin.

    Args:
        terrain: the field to sample
        extent: side length of the square, metres
        resolution: number of samples per side

    Returns:
        x coordinates (resolution,), y coordinates (resolution,) and heights
        of shape (resolution, resolution) indexed as [row=y, column=x].
    """

    if resolution < 2:
        raise ConfigError("resolution must be at least 2")
    if not extent > 0:
        raise ConfigError("extent must be positive")

    xs = np.linspace(-extent / 2, extent / 2, resolution)
    ys = np.linspace(-extent / 2, extent / 2, resolution)
    gx, gy = np.meshgrid(xs, ys)
    heights = np.asarray(terrain.height(gx, gy), dtype=np.float64)
    return xs, ys, heights


def raster_frame(terrain: TerrainField, extent: float, resolution: int) -> pd.DataFrame:
    """Terrain raster as a long table with x, y, z columns"""

    xs, ys, heights = rasterize(terrain, extent, resolution)
    gx, gy = np.meshgrid(xs, ys)
    return pd.DataFrame({"x": gx.ravel(), "y": gy.ravel(), "z": heights.ravel()})


def export_csv(
    terrain: TerrainField,
    path: str | Path,
    extent: float,
    resolution: int,
    cfg_hash: str = "none",
) -> Path:
    """Write the terrain raster as a CSV of (x, y, z) rows"""

    df = raster_frame(terrain, extent, resolution)
    path = write_versioned_csv(df, path, "terrain", cfg_hash)
    logger.info(f"Terrain grid written to {path}")
    return path


def heightmap_pixels(heights: np.ndarray) -> np.ndarray:
    """Map heights linearly onto 0..65535 over their min..max range.

    The first raster row is the smallest y, so rows are flipped to put +y at
    the top of the image.
    """

    low = float(heights.min())
    span = float(heights.max()) - low
    if span == 0:
        scaled = np.zeros_like(heights)
    else:
        scaled = (heights - low) / span
    return np.round(scaled[::-1] * 65535).astype(np.uint16)


def export_heightmap(
    terrain: TerrainField, path: str | Path, extent: float, resolution: int
) -> Path:
    """Write the terrain raster as a 16-bit grayscale PNG"""

    _, _, heights = rasterize(terrain, extent, resolution)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(heightmap_pixels(heights)).save(path)
    logger.info(f"Heightmap written to {path}")
    return path
