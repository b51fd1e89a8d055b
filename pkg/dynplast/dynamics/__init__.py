"""
Dynamics - time integration, compatible initial data, energy ledger and run artifacts.
"""

from dynplast.dynamics.state import (
    State,
    StepParams,
    BCMode,
    Model,
    StepRecord,
    Trajectory,
)
from dynplast.dynamics.initial import (
    CompatibleInitialData,
    check_initial_data,
    solve_auxiliary_displacement,
    make_initial,
    compatibility_residual,
)
from dynplast.dynamics.stepper import cfl_dt, check_cfl, step
from dynplast.dynamics.ledger import (
    LEDGER_COLUMNS,
    EnergyLedger,
    energy_ledger,
    kinetic_energy,
    elastic_energy,
)
from dynplast.dynamics.storage import (
    SnapshotWriter,
    read_snapshots,
    write_ledger_csv,
    read_ledger_csv,
    read_manifest,
    verify_artifacts,
)
from dynplast.dynamics.runner import (
    RunResult,
    LoadedRun,
    build_model,
    build_bc_mode,
    resolve_time,
    initial_state,
    run,
    load_run,
)

__all__ = [
    # State
    "State",
    "StepParams",
    "BCMode",
    "Model",
    "StepRecord",
    "Trajectory",
    # Initial data
    "CompatibleInitialData",
    "check_initial_data",
    "solve_auxiliary_displacement",
    "make_initial",
    "compatibility_residual",
    # Stepping
    "cfl_dt",
    "check_cfl",
    "step",
    # Ledger
    "LEDGER_COLUMNS",
    "EnergyLedger",
    "energy_ledger",
    "kinetic_energy",
    "elastic_energy",
    # Storage
    "SnapshotWriter",
    "read_snapshots",
    "write_ledger_csv",
    "read_ledger_csv",
    "read_manifest",
    "verify_artifacts",
    # Runner
    "RunResult",
    "LoadedRun",
    "build_model",
    "build_bc_mode",
    "resolve_time",
    "initial_state",
    "run",
    "load_run",
]
