"""
Initial-data families, body forces and builders from a SimConfig.

Families and the compatibility clauses they satisfy:

- zero: u0 = v0 = e0 = p0 = 0. Satisfies every clause for any partition.
  Motion comes from the body-force pulse.
- standing_wave: σ0 = 0, v0 = A·cos(πx/Lx)·e1 ("cos") or A·sin(πx/Lx)·e1 ("sin").
  Satisfies Eu0 = e0 + p0 and σ0ν = 0 everywhere. The "cos" variant needs a
  pure Neumann partition. The "sin" variant vanishes on the x-faces and
  allows Γ_D there. The 1-D wave u = (A/ω)·cos(πx/Lx)·sin(ωt)·e1 with
  ω = π·sqrt(λ+2µ)/Lx is exact when lambda = 0.
- plastic_loading: σ0 = 0, v0 = A·sin(πx/Lx)·exp(−y²/2w²)·d, a velocity pulse
  concentrated at the bottom edge. It vanishes on the x-faces, so Γ_D may sit
  there. With vanish_on_boundary the factor sin(πy/Ly) makes v0 vanish on all
  of ∂Ω, and any partition is admissible.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from dynplast.common.exceptions import ConfigurationError
from dynplast.config.schemas import SimConfig
from dynplast.core.algebra import HookeTensor
from dynplast.discretization.grid import BoundaryPartition, Grid
from dynplast.geometry.sets import Ball, DeviatoricCylinder, ElasticitySet, HalfspaceIntersection

logger = logging.getLogger(__name__)


@dataclass
class InitialFields:
    u0: np.ndarray
    v0: np.ndarray
    e0: np.ndarray
    p0: np.ndarray
    r_margin: float


# BUILDERS

def build_grid(config: SimConfig) -> Grid:
    g = config.grid
    return Grid(g.Lx, g.Ly, g.nx, g.ny)


def build_hooke(config: SimConfig) -> HookeTensor:
    return HookeTensor(config.hooke.lame_lambda, config.hooke.mu, dim=2)


def build_elasticity_set(config: SimConfig) -> ElasticitySet:
    k = config.elasticity_set
    if k.kind == "ball":
        return Ball(k.radius)
    if k.kind == "deviatoric_cylinder":
        return DeviatoricCylinder(k.radius)
    return HalfspaceIntersection(np.asarray(k.normals, dtype=float), np.asarray(k.offsets, dtype=float))


def build_partition(config: SimConfig, grid: Grid) -> BoundaryPartition:
    return BoundaryPartition.from_intervals(grid, config.partition.as_edges())


def _unit(direction) -> np.ndarray:
    d = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(d)
    if norm == 0:
        raise ConfigurationError("Direction vectors must be nonzero", key="direction")
    return d / norm


def build_initial_fields(config: SimConfig, grid: Grid) -> InitialFields:
    data = config.initial_data
    X = grid.node_coords()
    x, y = X[..., 0], X[..., 1]
    Lx, Ly = grid.Lx, grid.Ly
    v0 = grid.zero_vector_field()

    if data.family == "standing_wave":
        profile = np.cos(np.pi * x / Lx) if data.mode == "cos" else np.sin(np.pi * x / Lx)
        v0[..., 0] = data.amplitude * profile
    elif data.family == "plastic_loading":
        profile = np.sin(np.pi * x / Lx) * np.exp(-y ** 2 / (2.0 * data.width ** 2))
        if data.vanish_on_boundary:
            profile = profile * np.sin(np.pi * y / Ly)
        v0 = data.amplitude * profile[..., None] * _unit(data.direction)

    if data.velocity_perturbation:
        bump = np.sin(np.pi * x / Lx) * np.sin(np.pi * y / Ly)
        v0 = v0 + data.velocity_perturbation * bump[..., None] * np.array([1.0, 1.0]) / np.sqrt(2.0)

    # exact zeros on the boundary where the profile vanishes analytically
    v0[np.abs(v0) < 1e-14 * max(1.0, abs(data.amplitude))] = 0.0

    return InitialFields(
        u0=grid.zero_vector_field(),
        v0=v0,
        e0=grid.zero_sym_field(),
        p0=grid.zero_sym_field(),
        r_margin=data.r_margin,
    )


def build_body_force(config: SimConfig, grid: Grid) -> Optional[Callable[[float], np.ndarray]]:
    """Nodal force field as a function of time, or None."""
    bf = config.body_force
    if bf.kind == "none" or bf.amplitude == 0.0:
        return None
    X = grid.node_coords()
    r2 = np.sum((X - np.asarray(bf.center)) ** 2, axis=-1)
    shape = bf.amplitude * np.exp(-r2 / (2.0 * bf.width ** 2))[..., None] * _unit(bf.direction)
    duration = bf.duration

    def force(t: float) -> np.ndarray:
        if t < 0.0 or t > duration:
            return np.zeros_like(shape)
        return shape * np.sin(np.pi * t / duration) ** 2

    return force


# ANALYTIC REFERENCE

def standing_wave_frequency(config: SimConfig) -> float:
    return float(np.pi * np.sqrt(config.hooke.lame_lambda + 2.0 * config.hooke.mu) / config.grid.Lx)


def standing_wave_displacement(config: SimConfig, grid: Grid, t: float) -> np.ndarray:
    """Exact displacement of the standing-wave family (valid with lambda = 0 or Dirichlet y-faces)."""
    data = config.initial_data
    if data.family != "standing_wave":
        raise ConfigurationError("Analytic solution exists only for the standing_wave family",
                                 key="initial_data.family")
    omega = standing_wave_frequency(config)
    x = grid.node_coords()[..., 0]
    profile = np.cos(np.pi * x / grid.Lx) if data.mode == "cos" else np.sin(np.pi * x / grid.Lx)
    u = grid.zero_vector_field()
    u[..., 0] = data.amplitude / omega * profile * np.sin(omega * t)
    return u
