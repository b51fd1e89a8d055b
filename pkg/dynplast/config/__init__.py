"""
Configuration - validated simulation configs, environment settings and scenario builders.
"""

from dynplast.config.schemas import (
    SimConfig,
    GridConfig,
    HookeConfig,
    PartitionConfig,
    EdgeInterval,
    TimeConfig,
    InitialDataConfig,
    BodyForceConfig,
    parse_config,
    load_config,
    config_to_dict,
    config_hash,
    config_schema,
)
from dynplast.config.settings import Settings, get_settings
from dynplast.config.scenarios import (
    InitialFields,
    build_grid,
    build_hooke,
    build_elasticity_set,
    build_partition,
    build_initial_fields,
    build_body_force,
    standing_wave_frequency,
    standing_wave_displacement,
)

__all__ = [
    # Schemas
    "SimConfig",
    "GridConfig",
    "HookeConfig",
    "PartitionConfig",
    "EdgeInterval",
    "TimeConfig",
    "InitialDataConfig",
    "BodyForceConfig",
    "parse_config",
    "load_config",
    "config_to_dict",
    "config_hash",
    "config_schema",
    # Settings
    "Settings",
    "get_settings",
    # Scenarios
    "InitialFields",
    "build_grid",
    "build_hooke",
    "build_elasticity_set",
    "build_partition",
    "build_initial_fields",
    "build_body_force",
    "standing_wave_frequency",
    "standing_wave_displacement",
]
