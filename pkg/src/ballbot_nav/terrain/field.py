"""Heightfields built from fractal simplex noise.

A `TerrainField` is a pure function h(x, y) in metres over the infinite plane.
Heights, gradients and normals are evaluated analytically from the noise
lattice, so queries are exact at any sub-grid position.
"""

from dataclasses import dataclass, field, asdict

import numpy as np

from ballbot_nav.config import ConfigError
from ballbot_nav.terrain.noise import fractal2, octave_offsets, permutation_table


@dataclass(frozen=True)
class TerrainParams:
    """Parameters of the uneven-terrain distribution.

    Attributes:
        scale: noise lattice cells per `scale` length units
        octaves: number of noise layers
        persistence: amplitude ratio between layers
        lacunarity: frequency ratio between layers
        amplitude: vertical scaling of the unit noise, metres. 0 gives flat ground.
        seed: terrain seed, a non-negative integer below 2**64. Negative seeds
            are rejected rather than folded into the unsigned range.
        cell_size: metres per length unit
    """

    scale: float = 25.0
    octaves: int = 4
    persistence: float = 0.2
    lacunarity: float = 2.0
    amplitude: float = 0.35
    seed: int = 0
    cell_size: float = 0.1

    def __post_init__(self):
        if int(self.octaves) != self.octaves or self.octaves < 1:
            raise ConfigError(f"octaves must be an integer >= 1, got {self.octaves}")
        if not self.lacunarity > 1:
            raise ConfigError(f"lacunarity must be > 1, got {self.lacunarity}")
        if not 0 < self.persistence <= 1:
            raise ConfigError(f"persistence must be in (0, 1], got {self.persistence}")
        if not self.amplitude >= 0:
            raise ConfigError(f"amplitude must be >= 0, got {self.amplitude}")
        if not self.scale > 0 or not self.cell_size > 0:
            raise ConfigError("scale and cell_size must be > 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be in [0, 2**64), got {self.seed}")

    @property
    def height_bound(self) -> float:
        """Upper bound on |h| implied by the octave weights"""

        return self.amplitude * sum(self.persistence**k for k in range(self.octaves))

    def with_seed(self, seed: int) -> "TerrainParams":
        """Copy of these parameters with another seed"""

        return TerrainParams(**{**asdict(self), "seed": int(seed)})


@dataclass(frozen=True)
class TerrainField:
    """Continuous heightfield. Immutable and safe to share between environments."""

    params: TerrainParams
    perm: np.ndarray = field(repr=False, compare=False)
    offsets: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def is_flat(self) -> bool:
        return self.params.amplitude == 0

    @property
    def wavelength(self) -> float:
        """Metres per noise lattice unit of the first octave"""

        return self.params.scale * self.params.cell_size

    def height(self, x, y):
        """Terrain height at (x, y), metres. Accepts scalars or arrays."""

        if self.is_flat:
            shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
            return np.zeros(shape) if shape else 0.0

        p = self.params
        h = p.amplitude * fractal2(
            np.asarray(x, dtype=np.float64) / self.wavelength,
            np.asarray(y, dtype=np.float64) / self.wavelength,
            self.perm,
            p.octaves,
            p.persistence,
            p.lacunarity,
            offsets=self.offsets,
        )
        return h if np.ndim(h) else float(h)

    def height_and_gradient(self, x, y):
        """Height and its partial derivatives at (x, y)"""

        if self.is_flat:
            shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
            zero = np.zeros(shape) if shape else 0.0
            return zero, zero, zero

        p = self.params
        h, dx, dy = fractal2(
            np.asarray(x, dtype=np.float64) / self.wavelength,
            np.asarray(y, dtype=np.float64) / self.wavelength,
            self.perm,
            p.octaves,
            p.persistence,
            p.lacunarity,
            with_gradient=True,
            offsets=self.offsets,
        )
        k = p.amplitude / self.wavelength
        h = p.amplitude * h
        dx = k * dx
        dy = k * dy
        if np.ndim(h):
            return h, dx, dy
        return float(h), float(dx), float(dy)

    def gradient(self, x, y):
        """(dh/dx, dh/dy) at (x, y)"""

        _, dx, dy = self.height_and_gradient(x, y)
        return dx, dy

    def surface_normal(self, x, y) -> np.ndarray:
        """Upward unit normal at (x, y); shape (..., 3)"""

        dx, dy = self.gradient(x, y)
        return normal_from_gradient(dx, dy)


def normal_from_gradient(dx, dy) -> np.ndarray:
    """Unit normal of a surface z = h(x, y) from its gradient"""

    dx = np.asarray(dx, dtype=np.float64)
    dy = np.asarray(dy, dtype=np.float64)
    n = np.stack(np.broadcast_arrays(-dx, -dy, np.ones_like(dx + dy)), axis=-1)
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


def generate_terrain(params: TerrainParams) -> TerrainField:
    """Create the heightfield for a parameter set.

    Args:
        params: terrain parameters, validated on construction

    Returns:
        The terrain field. Repeated queries at the same point return identical values.
    """

    if not isinstance(params, TerrainParams):
        raise ConfigError("generate_terrain expects a TerrainParams instance")

    return TerrainField(
        params=params,
        perm=permutation_table(params.seed),
        offsets=octave_offsets(params.seed, params.octaves),
    )


def height(terrain: TerrainField, x, y):
    """Height of the terrain at (x, y), metres"""

    return terrain.height(x, y)


def gradient(terrain: TerrainField, x, y):
    """Partial derivatives (dh/dx, dh/dy) of the terrain at (x, y)"""

    return terrain.gradient(x, y)


def surface_normal(terrain: TerrainField, x, y) -> np.ndarray:
    """Upward unit normal normalize([-dh/dx, -dh/dy, 1]) at (x, y)"""

    return terrain.surface_normal(x, y)


def flattest_point(
    terrain: TerrainField, half_width: float = 1.0, samples: int = 9
) -> tuple[float, float]:
    """Least sloped point of a square grid centred on the origin.

    Among equally flat grid points the one closest to the origin wins, so flat
    ground always gives (0, 0) when `samples` is odd.

    Args:
        terrain: field to search
        half_width: the grid spans [-half_width, half_width] in x and y, metres
        samples: grid points per axis

    Returns:
        The (x, y) of the chosen grid point.
    """

    if samples < 1 or half_width < 0:
        raise ConfigError("flattest_point needs samples >= 1 and half_width >= 0")

    axis = np.linspace(-half_width, half_width, samples)
    xs, ys = np.meshgrid(axis, axis)
    xs, ys = xs.ravel(), ys.ravel()
    dx, dy = terrain.gradient(xs, ys)
    slope = np.hypot(dx, dy)
    best = np.lexsort((np.hypot(xs, ys), slope))[0]
    return float(xs[best]), float(ys[best])
