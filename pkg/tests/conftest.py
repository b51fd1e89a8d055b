"""Shared fixtures: small grids, partitions and scenario configs."""

import copy
import json

import numpy as np
import pytest

from dynplast.config.schemas import parse_config
from dynplast.discretization.grid import BoundaryPartition, Grid


ALL_N = {edge: [{"start": 0.0, "end": 1.0, "label": "N"}] for edge in ("bottom", "right", "top", "left")}
# clamped x-faces, free y-faces; the four corners become Σ nodes
CLAMPED_SIDES = {
    "bottom": [{"start": 0.0, "end": 1.0, "label": "N"}],
    "right": [{"start": 0.0, "end": 1.0, "label": "D"}],
    "top": [{"start": 0.0, "end": 1.0, "label": "N"}],
    "left": [{"start": 0.0, "end": 1.0, "label": "D"}],
}

ELASTIC_BASE = {
    "grid": {"Lx": 1.0, "Ly": 1.0, "nx": 8, "ny": 8},
    "hooke": {"lambda": 1.0, "mu": 1.0},
    "elasticity_set": {"kind": "ball", "radius": 1e6},
    "partition": ALL_N,
    "bc_mode": {"kind": "limit"},
    "time": {"T": 0.2, "cfl": 0.5},
    "initial_data": {"family": "standing_wave", "amplitude": 0.01, "mode": "cos"},
}

PLASTIC_BASE = {
    "grid": {"Lx": 1.0, "Ly": 1.0, "nx": 8, "ny": 8},
    "hooke": {"lambda": 1.0, "mu": 1.0},
    "elasticity_set": {"kind": "deviatoric_cylinder", "radius": 0.05},
    "partition": ALL_N,
    "bc_mode": {"kind": "limit"},
    "time": {"T": 0.3, "cfl": 0.5},
    "initial_data": {"family": "plastic_loading", "amplitude": 0.2, "width": 0.15, "r_margin": 0.05},
}


def make_config_dict(base: dict, **overrides) -> dict:
    """Deep copy of `base` with top-level sections replaced or updated."""
    data = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(data.get(key), dict) and "kind" not in value:
            data[key].update(value)
        else:
            data[key] = value
    return data


def make_config(base: dict = ELASTIC_BASE, **overrides):
    return parse_config(make_config_dict(base, **overrides))


def write_config(path, data: dict) -> str:
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.fixture
def grid():
    return Grid(1.0, 1.0, 8, 8)


@pytest.fixture
def neumann_partition(grid):
    return BoundaryPartition.pure(grid, "N")


@pytest.fixture
def mixed_partition(grid):
    edges = {edge: [(iv["start"], iv["end"], iv["label"]) for iv in intervals]
             for edge, intervals in CLAMPED_SIDES.items()}
    return BoundaryPartition.from_intervals(grid, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def elastic_config():
    return make_config(ELASTIC_BASE)


@pytest.fixture
def plastic_config():
    return make_config(PLASTIC_BASE)


@pytest.fixture
def mixed_plastic_config():
    return make_config(PLASTIC_BASE, partition=CLAMPED_SIDES,
                       bc_mode={"kind": "dissipative", "lambda": 100.0})
