"""Persistence images against a fine-grid quadrature oracle and closed forms."""

import numpy as np
import pytest

from talktopo.persistence import PersistenceDiagram
from talktopo.pimage import (
    PersistenceImage,
    PivConfig,
    birth_persistence_transform,
    piv_stability_constant,
    rasterize,
    resolve_weight_ceiling,
    surface_value,
)
from talktopo.wasserstein import wasserstein


def diag_of(points, dim=1):
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return PersistenceDiagram(
        dims=np.full(len(pts), dim, dtype=np.int32),
        births=pts[:, 0],
        deaths=pts[:, 1],
    )


def quadrature_image(points, cfg, subdiv=20):
    """Midpoint-rule pixel integrals with subdiv^2 samples per pixel."""
    p = cfg.pixels_per_axis
    b_lo, b_hi = cfg.birth_range
    p_lo, p_hi = cfg.persistence_range
    hx = (b_hi - b_lo) / (p * subdiv)
    hy = (p_hi - p_lo) / (p * subdiv)
    xs = b_lo + (np.arange(p * subdiv) + 0.5) * hx
    ys = p_lo + (np.arange(p * subdiv) + 0.5) * hy
    surf = surface_value(points, xs[None, :], ys[:, None], cfg)
    sums = surf.reshape(p, subdiv, p, subdiv).sum(axis=(1, 3))
    return sums * (hx * hy)


class TestConfig:
    def test_defaults(self):
        cfg = PivConfig()
        assert cfg.pixels_per_axis == 30
        assert cfg.variance == 0.01
        assert cfg.sigma == pytest.approx(0.1)
        assert cfg.birth_range == (0.0, 1.0)
        assert cfg.persistence_range == (0.0, 1.0)
        assert cfg.weight == "linear_persistence"
        assert cfg.weight_ceiling == "auto"

    def test_validation(self):
        with pytest.raises(ValueError):
            PivConfig(pixels_per_axis=0)
        with pytest.raises(ValueError):
            PivConfig(variance=0.0)
        with pytest.raises(ValueError):
            PivConfig(birth_range=(1.0, 1.0))
        with pytest.raises(ValueError):
            PivConfig(weight="quadratic")
        with pytest.raises(ValueError):
            PivConfig(weight_ceiling=-2.0)
        with pytest.raises(ValueError):
            PivConfig(weight_ceiling="corpus")

    def test_json_round_trip(self):
        for cfg in (PivConfig(), PivConfig(pixels_per_axis=8, variance=0.04,
                                           birth_range=(0.0, 2.0),
                                           persistence_range=(0.0, 0.5),
                                           weight="constant",
                                           weight_ceiling=0.7)):
            again = PivConfig.from_json_dict(cfg.to_json_dict())
            assert again == cfg

    def test_json_rejects_unknown_keys(self):
        with pytest.raises(ValueError, match="unknown"):
            PivConfig.from_json_dict({"pixels": 30})


class TestTransform:
    def test_maps_death_to_persistence(self):
        d = diag_of([(0.5, 1.0)])
        np.testing.assert_array_equal(
            birth_persistence_transform(d, 1), [[0.5, 0.5]]
        )

    def test_exact_on_thirds(self):
        d = diag_of([(1.0 / 3.0, 2.0 / 3.0)])
        out = birth_persistence_transform(d, 1)
        assert out[0, 0] == 1.0 / 3.0
        assert out[0, 1] == pytest.approx(1.0 / 3.0, abs=1e-16)

    def test_empty_dimension(self):
        d = diag_of([(0.5, 1.0)], dim=0)
        assert birth_persistence_transform(d, 1).shape == (0, 2)

    def test_rejects_infinite_death(self):
        d = PersistenceDiagram(
            dims=np.array([1]), births=np.array([0.1]), deaths=np.array([np.inf])
        )
        with pytest.raises(ValueError, match="essentials"):
            birth_persistence_transform(d, 1)


class TestSurface:
    def test_empty_points_vanish_everywhere(self):
        cfg = PivConfig()
        assert surface_value(np.empty((0, 2)), 0.3, 0.7, cfg) == 0.0

    def test_peak_value_constant_weight(self):
        cfg = PivConfig(weight="constant")
        got = surface_value([[0.4, 0.6]], 0.4, 0.6, cfg)
        assert got == pytest.approx(1.0 / (2.0 * np.pi * 0.01), rel=1e-12)

    def test_two_identical_points_double_the_surface(self):
        cfg = PivConfig(weight="constant")
        xs = np.linspace(0, 1, 7)[None, :]
        ys = np.linspace(0, 1, 7)[:, None]
        one = surface_value([[0.3, 0.5]], xs, ys, cfg)
        two = surface_value([[0.3, 0.5], [0.3, 0.5]], xs, ys, cfg)
        np.testing.assert_allclose(two, 2.0 * one, rtol=1e-12)

    def test_weight_ceiling_resolution(self):
        pts = np.array([[0.1, 0.2], [0.3, 0.6]])
        assert resolve_weight_ceiling(PivConfig(), pts) == 0.6
        assert resolve_weight_ceiling(PivConfig(weight_ceiling=2.0), pts) == 2.0
        assert resolve_weight_ceiling(PivConfig(), np.empty((0, 2))) == 1.0


class TestRasterize:
    def test_empty_diagram_is_exact_zero_vector(self):
        img = rasterize(diag_of(np.empty((0, 2))), dim=1, cfg=PivConfig())
        assert img.values.shape == (900,)
        assert np.all(img.values == 0.0)

    def test_centered_point_mass_and_argmax(self):
        # grid [0,1]^2 at 30 px: pixel centers at (k + 0.5)/30; point at
        # the center of pixel (15, 15) collects the most mass and total
        # grid mass stays below the full-plane mass of 1
        cfg = PivConfig(weight="constant")
        center = 15.5 / 30.0
        img = rasterize(diag_of([(center, 2.0 * center)], dim=1), 1, cfg)
        assert img.values.sum() <= 1.0 + 1e-12
        g = img.grid()
        i, j = np.unravel_index(np.argmax(g), g.shape)
        assert (i, j) == (15, 15)

    def test_vector_runs_birth_fastest_from_low_corner(self):
        cfg = PivConfig(weight="constant")
        img = rasterize(diag_of([(0.05, 0.05 + 0.95)]), 1, cfg)
        g = img.grid()
        i, j = np.unravel_index(np.argmax(g), g.shape)
        assert i >= 27 and j <= 2  # high persistence row, low birth column
        flat_idx = int(np.argmax(img.values))
        assert flat_idx == i * 30 + j

    def test_matches_quadrature_spec_example(self):
        cfg = PivConfig(weight_ceiling=1.0)
        d = diag_of([(0.5, 1.0)])  # birth 0.5, persistence 0.5
        img = rasterize(d, 1, cfg)
        oracle = quadrature_image(birth_persistence_transform(d, 1), cfg)
        assert np.max(np.abs(img.grid() - oracle)) <= 1e-6

    def test_matches_quadrature_random_diagrams(self):
        rng = np.random.default_rng(2101)
        for _ in range(8):
            k = int(rng.integers(1, 12))
            b = rng.uniform(0.0, 0.9, k)
            pers = rng.uniform(0.01, 0.9, k)
            d = diag_of(np.stack([b, b + pers], axis=1))
            cfg = PivConfig(weight_ceiling=float(rng.uniform(0.5, 1.5)))
            img = rasterize(d, 1, cfg)
            oracle = quadrature_image(birth_persistence_transform(d, 1), cfg)
            assert np.max(np.abs(img.grid() - oracle)) <= 1e-6

    def test_additive_over_disjoint_union_with_fixed_ceiling(self):
        rng = np.random.default_rng(2111)
        cfg = PivConfig(weight_ceiling=0.8)
        b1 = rng.uniform(0, 0.5, 5); p1 = rng.uniform(0.05, 0.5, 5)
        b2 = rng.uniform(0, 0.5, 7); p2 = rng.uniform(0.05, 0.5, 7)
        d1 = diag_of(np.stack([b1, b1 + p1], 1))
        d2 = diag_of(np.stack([b2, b2 + p2], 1))
        both = diag_of(np.vstack([np.stack([b1, b1 + p1], 1),
                                  np.stack([b2, b2 + p2], 1)]))
        lhs = rasterize(both, 1, cfg).values
        rhs = rasterize(d1, 1, cfg).values + rasterize(d2, 1, cfg).values
        assert np.max(np.abs(lhs - rhs)) <= 1e-12

    def test_zero_persistence_points_contribute_nothing(self):
        cfg = PivConfig(weight_ceiling=1.0)
        base = diag_of([(0.2, 0.7)])
        padded = diag_of([(0.2, 0.7), (0.4, 0.4), (0.8, 0.8)])
        np.testing.assert_array_equal(
            rasterize(base, 1, cfg).values, rasterize(padded, 1, cfg).values
        )

    def test_fixed_output_length_any_diagram_size(self):
        cfg = PivConfig(pixels_per_axis=7)
        for k in (0, 1, 23):
            pts = np.stack([np.linspace(0.1, 0.5, k),
                            np.linspace(0.2, 0.9, k)], axis=1) if k else np.empty((0, 2))
            img = rasterize(diag_of(pts), 1, cfg)
            assert img.values.shape == (49,)

    def test_image_type_validation(self):
        with pytest.raises(ValueError):
            PersistenceImage(values=np.zeros(10), config=PivConfig())
        with pytest.raises(ValueError):
            PersistenceImage(values=np.full(900, -1.0), config=PivConfig())


class TestStability:
    def test_image_shift_bounded_by_constant_times_w1(self):
        rng = np.random.default_rng(2201)
        cfg = PivConfig(weight_ceiling=1.0)
        L = piv_stability_constant(cfg)
        for _ in range(40):
            k = int(rng.integers(1, 8))
            b = rng.uniform(0.0, 0.8, k)
            pers = rng.uniform(0.05, 0.8, k)
            base = np.stack([b, b + pers], axis=1)
            jitter = rng.uniform(-0.02, 0.02, size=base.shape)
            moved = base + jitter
            moved[:, 1] = np.maximum(moved[:, 1], moved[:, 0] + 1e-6)
            d1, d2 = diag_of(base), diag_of(moved)
            eps = wasserstein(d1, d2, p=1.0, dim=1)
            if eps == 0.0:
                continue
            gap = np.max(np.abs(rasterize(d1, 1, cfg).values
                                - rasterize(d2, 1, cfg).values))
            assert gap <= L * eps

    def test_constant_requires_linear_weight_and_numeric_ceiling(self):
        with pytest.raises(ValueError):
            piv_stability_constant(PivConfig(weight="constant", weight_ceiling=1.0))
        with pytest.raises(ValueError):
            piv_stability_constant(PivConfig())
