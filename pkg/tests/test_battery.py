"""Test-function battery."""

import numpy as np
import pytest

from dynplast.analysis.battery import (
    REGIME_BOUNDARY,
    REGIME_FULL,
    REGIME_INTERIOR,
    REGIME_SIGMA_AVOIDING,
    SIGMA_CLEARANCE_CELLS,
    TestFunction,
    default_battery,
)
from dynplast.common.exceptions import ConfigurationError


class TestBump:

    def test_constant(self):
        one = TestFunction.constant()
        np.testing.assert_array_equal(one(np.zeros((3, 4, 2))), np.ones((3, 4)))
        np.testing.assert_array_equal(one.gradient(np.zeros((5, 2))), np.zeros((5, 2)))

    def test_values(self):
        phi = TestFunction("b", REGIME_INTERIOR, (0.5, 0.5), 0.2, power=2)
        assert phi(np.array([0.5, 0.5])) == 1.0
        assert phi(np.array([0.6, 0.5])) == pytest.approx(0.75 ** 2)
        assert phi(np.array([0.9, 0.5])) == 0.0

    @pytest.mark.parametrize("width", [None, 0.12])
    def test_gradient_matches_finite_differences(self, rng, width):
        phi = TestFunction("b", REGIME_INTERIOR, (0.4, 0.6), 0.3, width=width)
        x = 0.4 + 0.5 * rng.uniform(-0.3, 0.3, size=(200, 2))
        eps = 1e-7
        fd = np.stack([(phi(x + eps * e) - phi(x - eps * e)) / (2.0 * eps) for e in np.eye(2)], axis=-1)
        np.testing.assert_allclose(phi.gradient(x), fd, atol=1e-6)

    def test_nonnegative(self, rng):
        x = rng.uniform(-1.0, 2.0, size=(1000, 2))
        for width in (None, 0.1):
            phi = TestFunction("b", REGIME_BOUNDARY, (0.0, 0.5), 0.3, width=width)
            assert np.all(phi(x) >= 0.0)

    def test_gaussian_weight(self):
        plain = TestFunction("b", REGIME_INTERIOR, (0.5, 0.5), 0.2, power=2)
        weighted = TestFunction("g", REGIME_INTERIOR, (0.5, 0.5), 0.2, power=2, width=0.1)
        x = np.array([0.6, 0.5])
        assert weighted(x) == pytest.approx(plain(x) * np.exp(-0.5))
        assert weighted(np.array([0.5, 0.5])) == 1.0
        assert weighted(np.array([0.9, 0.5])) == 0.0

    @pytest.mark.parametrize("kwargs", [
        {"name": "x", "regime": "everywhere"},
        {"name": "x", "regime": REGIME_INTERIOR, "center": (0.5, 0.5), "radius": 0.0},
        {"name": "x", "regime": REGIME_INTERIOR, "center": (0.5, 0.5), "radius": 0.2, "width": 0.0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            TestFunction(**kwargs)


class TestDefaultBattery:

    def test_composition(self, grid, mixed_partition):
        battery = default_battery(grid, mixed_partition)
        regimes = [phi.regime for phi in battery]
        assert len(battery) == 28
        assert regimes.count(REGIME_FULL) == 1
        assert regimes.count(REGIME_INTERIOR) == 10
        assert regimes.count(REGIME_BOUNDARY) == 10
        assert regimes.count(REGIME_SIGMA_AVOIDING) == 7
        assert sum(phi.width is not None for phi in battery) == 4
        assert len({phi.name for phi in battery}) == 28

    def test_interior_bumps_vanish_on_boundary(self, grid, mixed_partition):
        for phi in default_battery(grid, mixed_partition):
            if phi.regime != REGIME_INTERIOR:
                continue
            assert phi.support_inside(grid)
            assert not np.any(mixed_partition.gather(phi.on_grid(grid)[0]))

    def test_boundary_bumps_reach_boundary(self, grid, mixed_partition):
        for phi in default_battery(grid, mixed_partition):
            if phi.regime == REGIME_BOUNDARY:
                assert np.any(mixed_partition.gather(phi.on_grid(grid)[0]) > 0.0)

    def test_sigma_avoiding_clearance(self, grid, mixed_partition):
        X = mixed_partition.gather(grid.node_coords())
        sigma_pts = X[mixed_partition.sigma_mask]
        clearance = SIGMA_CLEARANCE_CELLS * grid.h
        near = np.min(np.linalg.norm(X[:, None, :] - sigma_pts[None, :, :], axis=-1), axis=-1) <= clearance
        for phi in default_battery(grid, mixed_partition):
            if phi.regime != REGIME_SIGMA_AVOIDING:
                continue
            values = mixed_partition.gather(phi.on_grid(grid)[0])
            assert not np.any(values[near])

    def test_without_sigma_nodes(self, grid, neumann_partition):
        battery = default_battery(grid, neumann_partition)
        avoiding = [phi for phi in battery if phi.regime == REGIME_SIGMA_AVOIDING]
        assert all(phi.radius == pytest.approx(0.25) for phi in avoiding)
