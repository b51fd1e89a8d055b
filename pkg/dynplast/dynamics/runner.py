"""
Run a configured simulation end to end.

    config → model, mode, initial data → time loop → ledger → artifacts

Artifacts in the output directory:
    snapshots.bin   initial record plus every `snapshot_stride`-th step and the final step
    ledger.csv      ledger rows at the same steps (step 0 excluded)
    manifest.json   config, hash, versions, step data and artifact checksums; written last
"""

import logging
import math
from contextlib import nullcontext
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd
import scipy

import dynplast
from dynplast.config.scenarios import (
    build_body_force,
    build_elasticity_set,
    build_grid,
    build_hooke,
    build_initial_fields,
    build_partition,
)
from dynplast.common.exceptions import ConfigHashMismatchError
from dynplast.config.schemas import SimConfig, config_hash, config_to_dict, parse_config
from dynplast.core.algebra import hooke_apply, hooke_inverse
from dynplast.dynamics.initial import CompatibleInitialData, check_initial_data, make_initial
from dynplast.dynamics.ledger import EnergyLedger
from dynplast.dynamics.state import BCMode, Model, State, StepParams, StepRecord, Trajectory
from dynplast.dynamics.stepper import cfl_dt, check_cfl, step, velocity_scale
from dynplast.dynamics.storage import (
    LEDGER_FILE,
    MANIFEST_FILE,
    SNAPSHOT_FILE,
    SnapshotWriter,
    file_sha256,
    read_ledger_csv,
    read_manifest,
    read_snapshots,
    verify_artifacts,
    write_ledger_csv,
    write_manifest,
)

logger = logging.getLogger(__name__)

PROGRESS_EVERY = 500


@dataclass
class RunResult:
    """Outcome of one run."""
    config: SimConfig
    config_hash: str
    dt: float
    n_steps: int
    final_state: State
    ledger: pd.DataFrame
    trajectory: Trajectory
    initial_data: Optional[CompatibleInitialData] = None
    out_dir: Optional[Path] = None

    @property
    def max_abs_residual(self) -> float:
        return float(self.ledger["residual"].abs().max()) if len(self.ledger) else 0.0


# BUILDERS

def build_model(config: SimConfig) -> Model:
    grid = build_grid(config)
    return Model(
        grid=grid,
        partition=build_partition(config, grid),
        hooke=build_hooke(config),
        K=build_elasticity_set(config),
    )


def build_bc_mode(config: SimConfig) -> BCMode:
    mode = config.bc_mode
    if mode.kind == "dissipative":
        return BCMode.dissipative(mode.lam)
    return BCMode.limit(mode.lambda_ref)


def resolve_time(config: SimConfig, model: Model) -> Tuple[float, int]:
    """
    Time step and step count.

    With an explicit dt the step count is ceil(T/dt) and the final time may
    overshoot T by less than one step. Otherwise dt = T/n with the smallest n
    that honours the Courant factor.

    Raises:
        CFLViolationError: if an explicit dt exceeds the stability bound
    """
    time = config.time
    if time.dt is not None:
        check_cfl(model.grid, model.hooke, StepParams(dt=time.dt, cfl=time.cfl))
        return time.dt, int(math.ceil(time.T / time.dt - 1e-9)) if time.T > 0 else 0
    dt_max = cfl_dt(model.grid, model.hooke, time.cfl)
    if time.T == 0:
        return dt_max, 0
    n = int(math.ceil(time.T / dt_max - 1e-9))
    return time.T / n, n


def initial_state(
    config: SimConfig,
    model: Model,
    mode: BCMode,
    v0_override: Optional[np.ndarray] = None,
) -> Tuple[State, Optional[CompatibleInitialData]]:
    """
    Initial state of a run.

    Dissipative runs start from the λ-compatible data; the stress correction
    E(z0)/λ is booked as elastic strain and subtracted from p0 so that
    Eu0 = e0 + p0 still holds. Limit runs use the data as given.
    """
    fields = build_initial_fields(config, model.grid)
    v0 = fields.v0 if v0_override is None else v0_override

    if mode.is_limit:
        check_initial_data(model, fields.u0, v0, fields.e0, fields.p0, fields.r_margin)
        state = State.from_fields(model.grid, model.partition, model.hooke,
                                  fields.u0, v0, fields.e0, fields.p0)
        return state, None

    data = make_initial(model, fields.u0, v0, fields.e0, fields.p0, mode.lam, fields.r_margin)
    correction = hooke_inverse(model.hooke, data.Ez0) / mode.lam
    e0 = fields.e0 + correction
    state = State(
        t=0.0,
        u=fields.u0.copy(),
        v=data.v0_lambda,
        e=e0,
        p=fields.p0 - correction,
        sigma=hooke_apply(model.hooke, e0),
        pD=np.zeros((model.partition.size, 2)),
    )
    return state, data


def _versions() -> Dict[str, str]:
    return {
        "dynplast": dynplast.__version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
    }


def _saved(k: int, n_steps: int, stride: int) -> bool:
    return k % stride == 0 or k == n_steps


# RUN

def run(
    config: SimConfig,
    out_dir: Optional[Union[str, Path]] = None,
    keep_records: bool = True,
    snapshot_stride: Optional[int] = None,
    v0_override: Optional[np.ndarray] = None,
) -> RunResult:
    """
    Integrate one configuration to its final time.

    Args:
        config: validated configuration
        out_dir: artifact directory; None keeps everything in memory
        keep_records: keep every StepRecord in the returned trajectory
        snapshot_stride: overrides config.time.snapshot_stride
        v0_override: replaces the family's initial velocity (stability studies)

    Returns:
        RunResult with the in-memory ledger (every step) and trajectory

    Raises:
        InitialDataError, MarginViolationError, LinearSolveError: from the initial data
        StepAbortError: from the time loop
    """
    digest = config_hash(config)
    stride = snapshot_stride or config.time.snapshot_stride

    logger.info("=" * 60)
    logger.info(f"  RUN {digest[:12]}")
    logger.info("=" * 60)

    model = build_model(config)
    mode = build_bc_mode(config)
    dt, n_steps = resolve_time(config, model)
    force = build_body_force(config, model.grid)
    logger.info(f"Grid {model.grid.nx}x{model.grid.ny}, h={model.grid.h:.4g}, "
                f"mode {mode.describe()}, dt={dt:.6g}, steps={n_steps}")

    state, data = initial_state(config, model, mode, v0_override)
    params = StepParams(
        dt=dt,
        cfl=config.time.cfl,
        blowup_factor=config.time.blowup_factor,
        velocity_scale=velocity_scale(model, state.v, state.sigma),
    )

    trajectory = Trajectory(model=model, mode=mode, initial=state.copy(),
                            config_hash=digest, body_force=force)
    ledger = EnergyLedger(model, mode, state)

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        sink = SnapshotWriter(out_dir / SNAPSHOT_FILE, model.grid, model.partition.size, digest)
    else:
        sink = nullcontext()

    with sink as writer:
        if writer is not None:
            writer.write(0, state)
        for k in range(1, n_steps + 1):
            f = force(state.t + 0.5 * dt) if force is not None else None
            record = step(model, state, params, mode, f, step_index=k)
            row = ledger.update(state, record, f)
            if keep_records:
                trajectory.records.append(record)
            if writer is not None and _saved(k, n_steps, stride):
                writer.write(k, record.state, record)
            if k % PROGRESS_EVERY == 0:
                logger.info(f"step {k}/{n_steps}: t={record.state.t:.4g}, residual={row['residual']:.3e}")
            state = record.state

    frame = ledger.to_frame()

    result = RunResult(
        config=config,
        config_hash=digest,
        dt=dt,
        n_steps=n_steps,
        final_state=state,
        ledger=frame,
        trajectory=trajectory,
        initial_data=data,
        out_dir=out_dir,
    )

    if out_dir is not None:
        rows = frame.loc[[k for k in frame.index if k > 0 and _saved(k, n_steps, stride)]]
        write_ledger_csv(out_dir / LEDGER_FILE, rows, digest)
        _write_run_manifest(out_dir, result, stride)

    logger.info(f"Run complete: t={state.t:.6g}, max |residual|={result.max_abs_residual:.3e}, "
                f"plastic={frame['plastic_cum'].iloc[-1]:.6g}")
    return result


def _write_run_manifest(out_dir: Path, result: RunResult, stride: int) -> None:
    artifacts = {}
    for name in (SNAPSHOT_FILE, LEDGER_FILE):
        path = out_dir / name
        artifacts[name] = {"sha256": file_sha256(path), "bytes": path.stat().st_size}
    manifest: Dict[str, Any] = {
        "config": config_to_dict(result.config),
        "config_hash": result.config_hash,
        "versions": _versions(),
        "dt": result.dt,
        "n_steps": result.n_steps,
        "snapshot_stride": stride,
        "final_t": result.final_state.t,
        "max_abs_residual": result.max_abs_residual,
        "initial_data": result.initial_data.to_dict() if result.initial_data else None,
        "artifacts": artifacts,
    }
    write_manifest(out_dir / MANIFEST_FILE, manifest)


# LOADING

@dataclass
class LoadedRun:
    """A run directory read back from disk."""
    config: SimConfig
    manifest: Dict[str, Any]
    header: Dict[str, Any]
    trajectory: Trajectory
    ledger: pd.DataFrame
    steps: list

    @property
    def complete(self) -> bool:
        """True when every step is stored, so increments can be re-audited."""
        return self.manifest.get("snapshot_stride") == 1


def load_run(run_dir: Union[str, Path]) -> LoadedRun:
    """
    Read and verify a run directory.

    Raises:
        SnapshotIntegrityError: on missing, truncated or altered artifacts
        ConfigHashMismatchError: if an artifact names a different config
        ConfigurationError: if the manifest config no longer validates
    """
    run_dir = Path(run_dir)
    manifest = read_manifest(run_dir / MANIFEST_FILE)
    config = parse_config(manifest["config"])
    digest = config_hash(config)
    if digest != manifest.get("config_hash"):
        raise ConfigHashMismatchError("Manifest config does not match its recorded hash",
                                      expected=manifest.get("config_hash"), actual=digest)
    verify_artifacts(run_dir, manifest)
    header, records = read_snapshots(run_dir / SNAPSHOT_FILE, expected_hash=digest)
    ledger = read_ledger_csv(run_dir / LEDGER_FILE, expected_hash=digest)

    model = build_model(config)
    mode = build_bc_mode(config)
    dt = float(manifest["dt"])

    def to_state(r) -> State:
        return State(r["t"], r["u"], r["v"], r["e"], r["p"], r["sigma"], r["pD"])

    initial = to_state(records[0])
    step_records = [
        StepRecord(step=r["step"], state=to_state(r), dt=dt, de=r["de"], dp=r["dp"], traction=r["T"])
        for r in records[1:]
    ]
    trajectory = Trajectory(model=model, mode=mode, initial=initial, config_hash=digest,
                            body_force=build_body_force(config, model.grid), records=step_records)
    logger.info(f"Loaded run {run_dir}: {len(step_records)} stored steps of {manifest['n_steps']}")
    return LoadedRun(config=config, manifest=manifest, header=header, trajectory=trajectory,
                     ledger=ledger, steps=[r["step"] for r in records])
