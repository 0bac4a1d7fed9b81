"""Tests for terrain field module"""

import numpy as np
import pytest

from ballbot_nav import terrain
from ballbot_nav.config import ConfigError
from ballbot_nav.terrain.field import TerrainParams, normal_from_gradient
from ballbot_nav.terrain.noise import octave_offsets, permutation_table, fractal2


@pytest.fixture
def field():
    return terrain.generate_terrain(TerrainParams(seed=42))


@pytest.fixture
def flat():
    return terrain.generate_terrain(TerrainParams(amplitude=0.0, seed=3))


def random_points(n: int, seed: int = 0, half_width: float = 30.0):
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-half_width, half_width, n)
    return xs, rng.uniform(-half_width, half_width, n)


class TestTerrainParams:
    """Tests for TerrainParams validation"""

    def test_defaults(self):
        p = TerrainParams()
        assert (p.scale, p.octaves, p.persistence, p.lacunarity) == (25.0, 4, 0.2, 2.0)
        # calibrated so that the tuned PID degrades on uneven ground
        assert p.amplitude == 0.35

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"octaves": 0}, "octaves"),
            ({"lacunarity": 1.0}, "lacunarity"),
            ({"persistence": 0.0}, "persistence"),
            ({"persistence": 1.5}, "persistence"),
            ({"amplitude": -0.1}, "amplitude"),
            ({"seed": -1}, "seed"),
        ],
    )
    def test_invalid(self, kwargs, message):
        with pytest.raises(ConfigError, match=message):
            TerrainParams(**kwargs)

    def test_height_bound(self):
        p = TerrainParams(amplitude=1.0)
        assert p.height_bound == pytest.approx(1 + 0.2 + 0.04 + 0.008)

    def test_with_seed(self):
        p = TerrainParams(amplitude=0.3).with_seed(11)
        assert p.seed == 11
        assert p.amplitude == 0.3


class TestGenerateTerrain:
    """Tests for generate_terrain and height"""

    def test_repeated_queries_identical(self, field):
        assert terrain.height(field, 1.3, -2.7) == terrain.height(field, 1.3, -2.7)

    def test_seed_determinism(self):
        xs, ys = random_points(1000)
        a = terrain.generate_terrain(TerrainParams(seed=42)).height(xs, ys)
        b = terrain.generate_terrain(TerrainParams(seed=42)).height(xs, ys)
        c = terrain.generate_terrain(TerrainParams(seed=43)).height(xs, ys)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_flat_mode(self, flat):
        xs, ys = random_points(100)
        assert terrain.height(flat, 5.0, -1.0) == 0.0
        np.testing.assert_array_equal(flat.height(xs, ys), np.zeros(100))
        assert flat.is_flat

    def test_octave_amplitude_bound(self, field):
        xs, ys = random_points(1_000_000, seed=1, half_width=200.0)
        heights = field.height(xs, ys)
        bound = field.params.amplitude * (1 + 0.2 + 0.04 + 0.008)
        assert np.all(np.abs(heights) <= bound)

    def test_matches_noise_lattice(self):
        """Heights are the amplitude-scaled fractal noise at x / (scale * cell_size)"""

        p = TerrainParams(seed=7)
        f = terrain.generate_terrain(p)
        wavelength = p.scale * p.cell_size
        perm = permutation_table(7)
        offsets = octave_offsets(7, 4)
        for x, y in [(0.0, 0.0), (1.3, -2.7), (-12.5, 40.1)]:
            u, v = x / wavelength, y / wavelength
            expected = p.amplitude * float(
                fractal2(u, v, perm, 4, 0.2, 2.0, offsets=offsets)
            )
            assert terrain.height(f, x, y) == pytest.approx(expected, abs=1e-12)

    def test_invalid_argument(self):
        with pytest.raises(ConfigError):
            terrain.generate_terrain({"seed": 1})

    def test_origin_varies_across_seeds(self):
        fields = [terrain.generate_terrain(TerrainParams(seed=s)) for s in range(50)]
        samples = np.array([f.height_and_gradient(0.0, 0.0) for f in fields])
        heights, slopes = samples[:, 0], np.hypot(samples[:, 1], samples[:, 2])

        assert np.count_nonzero(heights) == 50
        assert np.std(heights) > 0.1 * fields[0].params.amplitude
        # a shared lattice corner would allow at most 8 distinct slopes here
        assert len(np.unique(np.round(slopes, 9))) > 40


class TestGradient:
    """Tests for gradient"""

    def test_flat(self, flat):
        assert terrain.gradient(flat, 0.4, 0.2) == (0.0, 0.0)

    def test_finite_difference(self, field):
        xs, ys = random_points(1000, seed=2)
        dx, dy = terrain.gradient(field, xs, ys)

        h = 1e-4
        fd_x = (field.height(xs + h, ys) - field.height(xs - h, ys)) / (2 * h)
        fd_y = (field.height(xs, ys + h) - field.height(xs, ys - h)) / (2 * h)

        err = np.hypot(dx - fd_x, dy - fd_y)
        scale = np.maximum(np.hypot(dx, dy), 1e-6)
        assert np.max(err / scale) < 1e-3

    def test_amplitude_linearity(self):
        xs, ys = random_points(200, seed=3)
        one = terrain.generate_terrain(TerrainParams(amplitude=0.15, seed=5))
        two = terrain.generate_terrain(TerrainParams(amplitude=0.3, seed=5))
        for g1, g2 in zip(one.gradient(xs, ys), two.gradient(xs, ys)):
            np.testing.assert_array_equal(g2, 2 * g1)


class TestSurfaceNormal:
    """Tests for surface_normal"""

    def test_flat(self, flat):
        np.testing.assert_array_equal(terrain.surface_normal(flat, 2.0, 3.0), [0, 0, 1])

    def test_closed_form(self):
        expected = np.array([-1.0, 0.0, 1.0]) / np.sqrt(2.0)
        np.testing.assert_allclose(normal_from_gradient(1.0, 0.0), expected, atol=1e-15)

    def test_unit_norm(self, field):
        xs, ys = random_points(1000, seed=4)
        normals = terrain.surface_normal(field, xs, ys)
        assert normals.shape == (1000, 3)
        np.testing.assert_allclose(np.linalg.norm(normals, axis=1), 1.0, atol=1e-9)
        assert np.all(normals[:, 2] > 0)


class TestFlattestPoint:
    """Tests for flattest_point"""

    def test_flat_is_origin(self, flat):
        assert terrain.flattest_point(flat) == (0.0, 0.0)

    def test_minimises_slope_on_grid(self, field):
        x, y = terrain.flattest_point(field, half_width=1.0, samples=9)
        axis = np.linspace(-1.0, 1.0, 9)
        xs, ys = np.meshgrid(axis, axis)
        slopes = np.hypot(*field.gradient(xs.ravel(), ys.ravel()))

        assert abs(x) <= 1.0 and abs(y) <= 1.0
        assert np.hypot(*field.gradient(x, y)) == pytest.approx(slopes.min())

    def test_invalid_grid(self, field):
        with pytest.raises(ConfigError, match="samples"):
            terrain.flattest_point(field, samples=0)
