"""Seeded 2-D simplex noise with analytic gradients.

The lattice follows the classic simplex construction: the plane is skewed so
that each unit square splits into two triangles, every triangle corner carries
a pseudo-random gradient chosen through a seeded permutation table, and each
corner contributes a radially attenuated dot product `(0.5 - r²)⁴ (g · d)`.
The sum is scaled by 70 so that the output stays inside [-1, 1].

All functions are vectorised over numpy arrays and also accept scalars.
"""

import numpy as np

SKEW = 0.5 * (np.sqrt(3.0) - 1.0)
UNSKEW = (3.0 - np.sqrt(3.0)) / 6.0
NOISE_SCALE = 70.0

# the 12 cube-edge gradients projected onto the plane
GRADIENTS = np.array(
    [
        [1, 1],
        [-1, 1],
        [1, -1],
        [-1, -1],
        [1, 0],
        [-1, 0],
        [1, 0],
        [-1, 0],
        [0, 1],
        [0, -1],
        [0, 1],
        [0, -1],
    ],
    dtype=np.float64,
)


def permutation_table(seed: int) -> np.ndarray:
    """Build the doubled permutation table for a seed.

    Args:
        seed: any non-negative integer below 2**64

    Returns:
        An int64 array of length 512 holding a permutation of 0..255 twice.
    """

    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    perm = rng.permutation(256).astype(np.int64)
    return np.concatenate([perm, perm])


def octave_offsets(seed: int, octaves: int) -> np.ndarray:
    """Per-octave lattice offsets for a seed.

    Each layer is shifted by its own offset so that the layers do not share
    lattice points. Without the shift every layer has a lattice corner at the
    origin, where simplex noise is exactly zero.

    Args:
        seed: any non-negative integer below 2**64
        octaves: number of layers

    Returns:
        A float64 array of shape (octaves, 2) with entries in [0, 256).
    """

    ss = np.random.SeedSequence(int(seed), spawn_key=(1,))
    return np.random.default_rng(ss).uniform(0.0, 256.0, size=(int(octaves), 2))


def _corner(
    dx: np.ndarray, dy: np.ndarray, gi: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Contribution of one simplex corner and its partial derivatives"""

    gx = GRADIENTS[gi, 0]
    gy = GRADIENTS[gi, 1]
    t = 0.5 - dx * dx - dy * dy
    inside = t > 0
    t = np.where(inside, t, 0.0)
    t2 = t * t
    t3 = t2 * t
    dot = gx * dx + gy * dy
    value = t2 * t2 * dot
    ddx = t3 * (t * gx - 8.0 * dx * dot)
    ddy = t3 * (t * gy - 8.0 * dy * dot)
    return value, ddx, ddy


def simplex2(
    x: np.ndarray, y: np.ndarray, perm: np.ndarray, with_gradient: bool = False
):
    """Evaluate 2-D simplex noise.

    Args:
        x: x coordinates in lattice units
        y: y coordinates in lattice units, broadcastable against x
        perm: permutation table from `permutation_table`
        with_gradient: also return the partial derivatives

    Returns:
        The noise value, or a tuple (value, d/dx, d/dy) if with_gradient is set.
    """

    x, y = np.broadcast_arrays(
        np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    )

    s = (x + y) * SKEW
    i = np.floor(x + s).astype(np.int64)
    j = np.floor(y + s).astype(np.int64)
    t = (i + j) * UNSKEW
    x0 = x - (i - t)
    y0 = y - (j - t)

    # which triangle of the skewed cell we are in
    upper = x0 > y0
    i1 = upper.astype(np.int64)
    j1 = 1 - i1

    x1 = x0 - i1 + UNSKEW
    y1 = y0 - j1 + UNSKEW
    x2 = x0 - 1.0 + 2.0 * UNSKEW
    y2 = y0 - 1.0 + 2.0 * UNSKEW

    ii = i & 255
    jj = j & 255
    g0 = perm[ii + perm[jj]] % 12
    g1 = perm[ii + i1 + perm[jj + j1]] % 12
    g2 = perm[ii + 1 + perm[jj + 1]] % 12

    n0, dx0, dy0 = _corner(x0, y0, g0)
    n1, dx1, dy1 = _corner(x1, y1, g1)
    n2, dx2, dy2 = _corner(x2, y2, g2)

    value = NOISE_SCALE * (n0 + n1 + n2)
    if not with_gradient:
        return value

    return value, NOISE_SCALE * (dx0 + dx1 + dx2), NOISE_SCALE * (dy0 + dy1 + dy2)


def fractal2(
    x: np.ndarray,
    y: np.ndarray,
    perm: np.ndarray,
    octaves: int,
    persistence: float,
    lacunarity: float,
    with_gradient: bool = False,
    offsets: np.ndarray | None = None,
):
    """Sum `octaves` layers of simplex noise.

    Octave k is sampled at frequency `lacunarity**k` and weighted by
    `persistence**k`, so the result is bounded by `sum(persistence**k)`.

    Args:
        x: x coordinates in lattice units
        y: y coordinates in lattice units
        perm: permutation table
        octaves: number of layers
        persistence: amplitude ratio between successive layers
        lacunarity: frequency ratio between successive layers
        with_gradient: also return the partial derivatives
        offsets: lattice shift of each layer, shape (octaves, 2), from
            `octave_offsets`. None samples every layer unshifted.

    Returns:
        The noise value, or a tuple (value, d/dx, d/dy) if with_gradient is set.
    """

    total = 0.0
    gx = 0.0
    gy = 0.0
    frequency = 1.0
    weight = 1.0
    for k in range(octaves):
        ox, oy = (0.0, 0.0) if offsets is None else offsets[k]
        u = x * frequency + ox
        w = y * frequency + oy
        if with_gradient:
            v, dx, dy = simplex2(u, w, perm, True)
            gx = gx + weight * frequency * dx
            gy = gy + weight * frequency * dy
        else:
            v = simplex2(u, w, perm)
        total = total + weight * v
        frequency *= lacunarity
        weight *= persistence

    if with_gradient:
        return total, gx, gy
    return total
