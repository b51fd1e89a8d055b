"""
Nonnegative test functions for the duality and convexity checks.

Bumps are compactly supported polynomials φ(x) = (1 − |x−c|²/R²)₊^k with
an analytic gradient, optionally weighted by a Gaussian exp(−|x−c|²/2w²).
The default battery covers four regimes:

    full             φ ≡ 1
    interior         support strictly inside Ω
    boundary         support crossing ∂Ω (may touch Σ)
    sigma_avoiding   support meets ∂Ω but vanishes within 3h of Σ
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from dynplast.common.exceptions import ConfigurationError
from dynplast.discretization.grid import BoundaryPartition, Grid

logger = logging.getLogger(__name__)

REGIME_FULL = "full"
REGIME_INTERIOR = "interior"
REGIME_BOUNDARY = "boundary"
REGIME_SIGMA_AVOIDING = "sigma_avoiding"
REGIMES = (REGIME_FULL, REGIME_INTERIOR, REGIME_BOUNDARY, REGIME_SIGMA_AVOIDING)

BUMP_POWER = 4
SIGMA_CLEARANCE_CELLS = 3
GAUSSIAN_WIDTH_FRACTION = 0.4


@dataclass(frozen=True)
class TestFunction:
    """A constant or a polynomial bump; center=None means φ ≡ 1, width sets a Gaussian weight."""
    __test__ = False

    name: str
    regime: str
    center: Optional[Tuple[float, float]] = None
    radius: float = 1.0
    power: int = BUMP_POWER
    width: Optional[float] = None

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ConfigurationError(f"Unknown test-function regime {self.regime!r}", key="regime")
        if self.center is not None and not self.radius > 0:
            raise ConfigurationError("Bump radius must be positive", key="radius")
        if self.width is not None and not self.width > 0:
            raise ConfigurationError("Gaussian width must be positive", key="width")

    @classmethod
    def constant(cls) -> "TestFunction":
        return cls(name="one", regime=REGIME_FULL)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.center is None:
            return np.ones(x.shape[:-1])
        r2 = np.sum((x - np.asarray(self.center)) ** 2, axis=-1)
        bump = np.maximum(1.0 - r2 / self.radius ** 2, 0.0) ** self.power
        return bump * self._gaussian(r2)

    def _gaussian(self, r2: np.ndarray) -> np.ndarray:
        if self.width is None:
            return np.ones_like(r2)
        return np.exp(-0.5 * r2 / self.width ** 2)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.center is None:
            return np.zeros_like(x)
        d = x - np.asarray(self.center)
        r2 = np.sum(d ** 2, axis=-1)
        q = np.maximum(1.0 - r2 / self.radius ** 2, 0.0)
        coef = -2.0 * self.power * q ** (self.power - 1) / self.radius ** 2
        if self.width is not None:
            coef = coef - q ** self.power / self.width ** 2
        return (coef * self._gaussian(r2))[..., None] * d

    def on_grid(self, grid: Grid) -> Tuple[np.ndarray, np.ndarray]:
        """(nodal values, cell-centre values)."""
        return self(grid.node_coords()), self(grid.cell_centers())

    def support_inside(self, grid: Grid) -> bool:
        """True when φ vanishes at every boundary node."""
        if self.center is None:
            return False
        cx, cy = self.center
        return (cx - self.radius >= 0.0 and cx + self.radius <= grid.Lx
                and cy - self.radius >= 0.0 and cy + self.radius <= grid.Ly)


def _perimeter_point(grid: Grid, fraction: float) -> np.ndarray:
    # counter-clockwise from the origin, matching the boundary node order
    Lx, Ly = grid.Lx, grid.Ly
    s = (fraction % 1.0) * grid.perimeter
    if s <= Lx:
        return np.array([s, 0.0])
    s -= Lx
    if s <= Ly:
        return np.array([Lx, s])
    s -= Ly
    if s <= Lx:
        return np.array([Lx - s, Ly])
    s -= Lx
    return np.array([0.0, Ly - s])


def default_battery(grid: Grid, partition: BoundaryPartition) -> List[TestFunction]:
    """
    The fixed 28-function battery: φ ≡ 1, 8 interior and 8 boundary-straddling
    bumps, 2 Gaussian-weighted bumps in each of those regimes and 7 Σ-avoiding
    bumps.
    """
    Lx, Ly = grid.Lx, grid.Ly
    L = min(Lx, Ly)
    battery = [TestFunction.constant()]

    r_in = 0.15 * L
    for i, fx in enumerate((0.2, 0.4, 0.6, 0.8)):
        for j, fy in enumerate((0.35, 0.65)):
            battery.append(TestFunction(f"interior_{i}{j}", REGIME_INTERIOR,
                                        (fx * Lx, fy * Ly), r_in))

    r_bd = 0.3 * L
    straddle = [(0.5, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 0.5),
                (0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    for k, (fx, fy) in enumerate(straddle):
        battery.append(TestFunction(f"boundary_{k}", REGIME_BOUNDARY, (fx * Lx, fy * Ly), r_bd))

    # Gaussian-weighted bumps concentrate the weight near their centre
    gauss = [(REGIME_INTERIOR, (0.3, 0.5), 0.2), (REGIME_INTERIOR, (0.7, 0.5), 0.2),
             (REGIME_BOUNDARY, (0.5, 0.0), 0.3), (REGIME_BOUNDARY, (0.5, 1.0), 0.3)]
    for k, (regime, (fx, fy), fr) in enumerate(gauss):
        battery.append(TestFunction(f"gaussian_{regime}_{k}", regime, (fx * Lx, fy * Ly),
                                    fr * L, width=GAUSSIAN_WIDTH_FRACTION * fr * L))

    X = grid.node_coords()
    sigma_pts = np.array([X[i, j] for i, j in partition.nodes[partition.sigma_mask]]).reshape(-1, 2)
    clearance = SIGMA_CLEARANCE_CELLS * grid.h
    r_max = 0.25 * L
    middle = np.array([0.5 * Lx, 0.5 * Ly])
    for k in range(7):
        center = _perimeter_point(grid, (k + 0.5) / 7.0)
        radius = r_max
        if sigma_pts.size:
            radius = min(r_max, float(np.min(np.linalg.norm(sigma_pts - center, axis=-1))) - clearance)
            if radius < grid.h:
                center = middle
                reach = float(np.min(np.linalg.norm(sigma_pts - middle, axis=-1)))
                radius = min(r_max, reach - clearance)
                if radius <= 0:
                    # coarse grids: keep clear of Σ by half the distance
                    radius = 0.5 * reach
        battery.append(TestFunction(f"sigma_avoiding_{k}", REGIME_SIGMA_AVOIDING,
                                    (float(center[0]), float(center[1])), radius))

    logger.debug(f"Test battery: {len(battery)} functions, {int(np.sum(partition.sigma_mask))} Σ nodes")
    return battery
