"""
Discrete energy balance.

    K(t) + E(t) + plastic + boundary ψ + boundary flux = K(0) + E(0) + work

Plastic dissipation is Σ H(Δp) h² plus, for the exact Dirichlet limit, the
Γ_D slip term Σ H(−dt v⁺⊙ν) ds. The per-step mismatch of the explicit scheme
is O(dt²), so the accumulated residual is O(dt).
"""

import logging
from dataclasses import dataclass, asdict
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from dynplast.core.algebra import quadratic_Q
from dynplast.discretization.operators import sym_gradient_adjoint
from dynplast.dynamics.state import BCMode, Model, State, StepRecord, Trajectory
from dynplast.geometry.boundary import boundary_dissipation_density, psi_eval

logger = logging.getLogger(__name__)

LEDGER_COLUMNS = [
    "t",
    "kinetic",
    "elastic",
    "plastic_cum",
    "boundary_psi_cum",
    "boundary_flux_cum",
    "work_cum",
    "residual",
    "sigma_gap",
]
EXTRA_COLUMNS = ["neumann_flux_cum", "dirichlet_slip_cum", "dirichlet_psi_cum"]


def kinetic_energy(model: Model, v: np.ndarray) -> float:
    return 0.5 * float(np.sum(model.nodal_weights[..., None] * v * v))


def elastic_energy(model: Model, e: np.ndarray) -> float:
    return float(np.sum(quadratic_Q(model.hooke, e))) * model.grid.h ** 2


@dataclass
class LedgerIncrement:
    plastic: float = 0.0
    dirichlet_slip: float = 0.0
    psi: float = 0.0
    dirichlet_psi: float = 0.0
    flux: float = 0.0
    neumann_flux: float = 0.0
    work: float = 0.0
    sigma_gap: float = 0.0


def interior_dissipation(model: Model, dp: np.ndarray) -> float:
    """Σ H(Δp) h² over yielding cells."""
    active = np.any(dp != 0.0, axis=(-2, -1))
    if not np.any(active):
        return 0.0
    return float(np.sum(model.K.support(dp[active]))) * model.grid.h ** 2


def dirichlet_slip_density(model: Model, nu: np.ndarray, slip: np.ndarray) -> np.ndarray:
    """
    H(−slip⊙ν) per node.

    When K is unbounded along the identity the exact-limit slip is tangential;
    the rounding residue along ν is dropped before evaluating H.
    """
    if slip.size == 0:
        return np.zeros(0)
    unbounded = np.isinf(boundary_dissipation_density(model.K, nu, nu))
    if np.any(unbounded):
        tangent = np.stack([-nu[:, 1], nu[:, 0]], axis=-1)
        tangential = np.sum(slip * tangent, axis=-1)[:, None] * tangent
        slip = np.where(unbounded[:, None], tangential, slip)
    return boundary_dissipation_density(model.K, nu, slip)


def step_increment(
    model: Model,
    mode: BCMode,
    prev: State,
    record: StepRecord,
    f: Optional[np.ndarray] = None,
) -> LedgerIncrement:
    """Ledger increments of one step, from the pre-step state and the step record."""
    partition = model.partition
    dt = record.dt
    x = partition.gather(record.state.v)
    T = record.traction
    ds = partition.ds
    s = mode.weights(partition)
    nu = partition.normals

    inc = LedgerIncrement()
    inc.plastic = interior_dissipation(model, record.dp)

    exact = np.isinf(s)
    if np.any(exact):
        density = dirichlet_slip_density(model, nu[exact], dt * x[exact])
        inc.dirichlet_slip = float(np.sum(density * ds[exact]))
        inc.plastic += inc.dirichlet_slip

    relaxed = (s > 0) & np.isfinite(s)
    for weight in np.unique(s[relaxed]):
        sel = s == weight
        psi = psi_eval(model.K, nu[sel], float(weight), x[sel])
        inc.psi += dt * float(np.sum(psi * ds[sel]))
        inc.dirichlet_psi += dt * float(np.sum((psi * ds[sel])[partition.d_mask[sel]]))
        inc.flux += dt * float(np.sum(np.sum(T[sel] ** 2, axis=-1) / (2.0 * weight) * ds[sel]))

    n_mask = partition.n_mask
    inc.neumann_flux = dt * float(np.sum(np.sum(T[n_mask] ** 2, axis=-1) * ds[n_mask]))

    if f is not None:
        inc.work = dt * float(np.sum(model.nodal_weights[..., None] * f * record.state.v))

    sig = partition.sigma_mask
    if np.any(sig):
        force = -model.grid.h ** 2 * partition.gather(sym_gradient_adjoint(model.grid, prev.sigma))
        inc.sigma_gap = dt * float(np.sum(force[sig] * x[sig]))
    return inc


class EnergyLedger:
    """Running energy balance of a simulation."""

    def __init__(self, model: Model, mode: BCMode, initial: State):
        self.model = model
        self.mode = mode
        self.kinetic0 = kinetic_energy(model, initial.v)
        self.elastic0 = elastic_energy(model, initial.e)
        self.totals = LedgerIncrement()
        self.rows: List[Dict[str, float]] = [self._row(0, initial.t, self.kinetic0, self.elastic0)]

    def _row(self, step: int, t: float, kinetic: float, elastic: float) -> Dict[str, float]:
        tot = self.totals
        residual = (kinetic + elastic + tot.plastic + tot.psi + tot.flux
                    - (self.kinetic0 + self.elastic0 + tot.work))
        return {
            "step": step,
            "t": t,
            "kinetic": kinetic,
            "elastic": elastic,
            "plastic_cum": tot.plastic,
            "boundary_psi_cum": tot.psi,
            "boundary_flux_cum": tot.flux,
            "work_cum": tot.work,
            "residual": residual,
            "sigma_gap": tot.sigma_gap,
            "neumann_flux_cum": tot.neumann_flux,
            "dirichlet_slip_cum": tot.dirichlet_slip,
            "dirichlet_psi_cum": tot.dirichlet_psi,
        }

    def update(self, prev: State, record: StepRecord, f: Optional[np.ndarray] = None) -> Dict[str, float]:
        inc = step_increment(self.model, self.mode, prev, record, f)
        for key, value in asdict(inc).items():
            setattr(self.totals, key, getattr(self.totals, key) + value)
        row = self._row(record.step, record.state.t,
                        kinetic_energy(self.model, record.state.v),
                        elastic_energy(self.model, record.state.e))
        self.rows.append(row)
        return row

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows, columns=["step"] + LEDGER_COLUMNS + EXTRA_COLUMNS)
        return frame.set_index("step")

    @property
    def max_abs_residual(self) -> float:
        return max((abs(r["residual"]) for r in self.rows), default=0.0)


def energy_ledger(trajectory: Trajectory) -> pd.DataFrame:
    """Recompute the ledger of a trajectory from its per-step records."""
    ledger = EnergyLedger(trajectory.model, trajectory.mode, trajectory.initial)
    prev = trajectory.initial
    for record in trajectory.records:
        f = None
        if trajectory.body_force is not None:
            f = trajectory.body_force(prev.t + 0.5 * record.dt)
        ledger.update(prev, record, f)
        prev = record.state
    return ledger.to_frame()
