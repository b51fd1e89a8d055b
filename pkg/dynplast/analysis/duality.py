"""
Discrete stress/strain duality pairing.

For one step with velocity v (= Δu/dt), elastic-strain increment Δe, stress σ
and boundary traction T, the pairing against a test function φ is

    [σ:Δp](φ) = −Σ φ_c σ:Δe h² − dt Σ m φ_n v·div(σ, T) − Σ σ:C(φ, dt v) h²

with div(σ, T) the adjoint divergence carrying the run's traction. The
"discrete" product rule uses the commutator C(φ, w) = E(φ_n w) − φ_c E(w),
for which the discrete Green identity gives exactly

    [σ:Δp](φ) = Σ φ_c σ:Δp h² − dt Σ φ_b T·v ds.

The "analytic" rule uses w⊙∇φ at cell centres and agrees up to O(h).
"""

import logging
from typing import Optional, Tuple

import numpy as np

from dynplast.analysis.battery import TestFunction
from dynplast.common.exceptions import ConfigurationError
from dynplast.core.algebra import frob_dot, sym_outer
from dynplast.discretization.grid import BoundaryPartition, Grid
from dynplast.discretization.operators import divergence_with_traction, sym_gradient

logger = logging.getLogger(__name__)

PRODUCT_RULES = ("discrete", "analytic")


def _cell_average(grid: Grid, u: np.ndarray) -> np.ndarray:
    return 0.25 * (u[:-1, :-1] + u[1:, :-1] + u[:-1, 1:] + u[1:, 1:])


def _check_window(grid: Grid, phi: TestFunction) -> None:
    if phi.center is None:
        return
    c = np.asarray(phi.center, dtype=float)
    nearest = np.clip(c, 0.0, [grid.Lx, grid.Ly])
    if np.linalg.norm(c - nearest) >= phi.radius:
        raise ConfigurationError(f"Support of test function {phi.name} misses the computational window",
                                 key="phi")


def pairing_terms(
    grid: Grid,
    partition: BoundaryPartition,
    sigma: np.ndarray,
    v: np.ndarray,
    de: np.ndarray,
    traction: np.ndarray,
    dt: float,
    phi: TestFunction,
    product_rule: str = "discrete",
    divergence: Optional[np.ndarray] = None,
) -> Tuple[float, float, float]:
    """
    The three sums of the pairing: (Σ φ_c σ:Δe h², dt Σ m φ_n v·div, Σ σ:C h²).

    Raises:
        ConfigurationError: for an unknown product rule or a test function outside the grid
    """
    if product_rule not in PRODUCT_RULES:
        raise ConfigurationError(f"Unknown product rule {product_rule!r}", key="product_rule")
    _check_window(grid, phi)
    h2 = grid.h ** 2
    phi_n, phi_c = phi.on_grid(grid)
    if divergence is None:
        divergence = divergence_with_traction(grid, partition, sigma, traction)

    elastic = float(np.sum(phi_c * frob_dot(sigma, de))) * h2
    momentum = dt * float(np.sum((grid.nodal_weights() * phi_n)[..., None] * v * divergence))

    if product_rule == "discrete":
        w = dt * v
        commutator = sym_gradient(grid, phi_n[..., None] * w) - phi_c[..., None, None] * sym_gradient(grid, w)
    else:
        w = dt * _cell_average(grid, v)
        commutator = sym_outer(w, phi.gradient(grid.cell_centers()))
    coupling = float(np.sum(frob_dot(sigma, commutator))) * h2
    return elastic, momentum, coupling


def duality_pairing(
    grid: Grid,
    partition: BoundaryPartition,
    sigma: np.ndarray,
    v: np.ndarray,
    de: np.ndarray,
    traction: np.ndarray,
    dt: float,
    phi: TestFunction,
    product_rule: str = "discrete",
    divergence: Optional[np.ndarray] = None,
) -> float:
    """
    Pairing of σ with the plastic-strain increment of one step against φ.

    Args:
        v: post-step nodal velocity
        de: elastic-strain increment Δε − Δp of the step
        traction: the run's boundary traction, one row per boundary node
        divergence: precomputed div(σ, T) when pairing many test functions
    """
    return -sum(pairing_terms(grid, partition, sigma, v, de, traction, dt, phi,
                              product_rule, divergence))


def direct_plastic_work(grid: Grid, sigma: np.ndarray, dp: np.ndarray, phi: TestFunction) -> float:
    """Σ φ_c σ:Δp h²."""
    _, phi_c = phi.on_grid(grid)
    return float(np.sum(phi_c * frob_dot(sigma, dp))) * grid.h ** 2


def boundary_traction_power(
    grid: Grid,
    partition: BoundaryPartition,
    v: np.ndarray,
    traction: np.ndarray,
    dt: float,
    phi: TestFunction,
    mask: Optional[np.ndarray] = None,
) -> float:
    """dt Σ φ_b T·v ds over the selected boundary nodes."""
    phi_b = partition.gather(phi.on_grid(grid)[0])
    power = phi_b * np.sum(traction * partition.gather(v), axis=-1) * partition.ds
    if mask is not None:
        power = power[mask]
    return dt * float(np.sum(power))
