"""
Compatible initial data for the dissipative problem.

Given data (u0, v0, e0, p0) satisfying the mixed-problem compatibility
conditions, build (v0λ, σ0λ) with S_λ v0λ + σ0λ ν = 0 at every non-Σ
boundary node:

    v0λ = v0 + v̂0/λ       v̂0 = −σ0ν on the boundary, 0 inside
    σ0λ = σ0 + E(z0)/λ    z0 − div E(z0) = 0,  E(z0)ν = −v0
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from dynplast.common.exceptions import InitialDataError, LinearSolveError, MarginViolationError
from dynplast.core.algebra import frob_norm, hooke_apply
from dynplast.discretization.grid import LABEL_D, LABEL_N, LABEL_SIGMA
from dynplast.discretization.operators import normal_trace, sparse_sym_gradient, sym_gradient
from dynplast.dynamics.state import Model

logger = logging.getLogger(__name__)

DATA_TOL = 1e-10
SOLVE_TOL = 1e-9


@dataclass
class CompatibleInitialData:
    """Corrected initial velocity and stress with the auxiliary fields that built them."""
    lam: float
    v0_lambda: np.ndarray
    sigma0_lambda: np.ndarray
    v_hat: np.ndarray
    z0: np.ndarray
    Ez0: np.ndarray
    compatibility_residual: float
    required_lambda: float

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "compatibility_residual": self.compatibility_residual,
            "required_lambda": self.required_lambda,
            "max_abs_v_hat": float(np.max(np.abs(self.v_hat))) if self.v_hat.size else 0.0,
            "max_abs_Ez0": float(np.max(frob_norm(self.Ez0))) if self.Ez0.size else 0.0,
        }


def check_initial_data(
    model: Model,
    u0: np.ndarray,
    v0: np.ndarray,
    e0: np.ndarray,
    p0: np.ndarray,
    r_margin: float,
) -> None:
    """
    Verify the discrete compatibility conditions of the initial data.

    Raises:
        InitialDataError: naming the violated clause
    """
    grid, partition = model.grid, model.partition
    sigma0 = hooke_apply(model.hooke, e0)

    Eu0 = sym_gradient(grid, u0)
    drift = float(np.max(np.abs(Eu0 - e0 - p0))) if Eu0.size else 0.0
    scale = max(1.0, float(np.max(np.abs(Eu0))))
    if drift > DATA_TOL * scale:
        raise InitialDataError(f"Eu0 = e0 + p0 violated by {drift:.3e}", clause="additive_decomposition")

    v_scale = max(1.0, float(np.max(np.abs(v0))))
    v_d = partition.gather(v0)[partition.labels == LABEL_D]
    if v_d.size and float(np.max(np.abs(v_d))) > DATA_TOL * v_scale:
        raise InitialDataError(f"v0 does not vanish on Γ_D (max {np.max(np.abs(v_d)):.3e})",
                               clause="dirichlet_velocity")

    s_scale = max(1.0, float(np.max(np.abs(sigma0))))
    trace_n = normal_trace(grid, partition, sigma0)[partition.labels == LABEL_N]
    if trace_n.size and float(np.max(np.abs(trace_n))) > DATA_TOL * s_scale:
        raise InitialDataError(f"σ0ν does not vanish on Γ_N (max {np.max(np.abs(trace_n)):.3e})",
                               clause="neumann_traction")

    margin = model.K.interior_margin(sigma0)
    worst = np.unravel_index(int(np.argmin(margin)), margin.shape)
    if float(margin[worst]) < r_margin:
        raise InitialDataError(
            f"σ0 + Ball({r_margin}) is not inside K at cell {tuple(int(i) for i in worst)}",
            clause="margin",
            details={"cell": tuple(int(i) for i in worst), "margin": float(margin[worst])},
        )


def solve_auxiliary_displacement(model: Model, v0: np.ndarray) -> np.ndarray:
    """
    Solve z − div E(z) = 0 with E(z)ν = −v0 enforced at every non-Σ boundary node.

    Boundary rows of the symmetric positive definite system carry no mass, so
    the discrete normal trace of E(z) equals −v0 there to rounding.

    Raises:
        LinearSolveError: if the sparse solve fails or leaves a large residual
    """
    grid, partition = model.grid, model.partition
    h2 = grid.h ** 2
    G = sparse_sym_gradient(grid)

    mass = np.repeat(model.nodal_weights.ravel(), 2)
    boundary_dofs = np.concatenate([2 * partition.flat_index, 2 * partition.flat_index + 1])
    strong = ~partition.sigma_mask
    strong_dofs = np.concatenate([2 * partition.flat_index[strong], 2 * partition.flat_index[strong] + 1])
    mass[strong_dofs] = 0.0

    rhs = np.zeros(mass.size)
    weighted = -(partition.ds[:, None] * partition.gather(v0))
    rhs[boundary_dofs] = np.concatenate([weighted[:, 0], weighted[:, 1]])

    system = (h2 * (G.T @ G) + sparse.diags(mass)).tocsc()
    logger.debug(f"Auxiliary solve: {system.shape[0]} unknowns, {system.nnz} nonzeros")
    try:
        z = spsolve(system, rhs)
    except Exception as e:
        raise LinearSolveError("Sparse solve for the auxiliary displacement failed", original_error=e)

    residual = float(np.max(np.abs(system @ z - rhs))) if rhs.size else 0.0
    scale = max(float(np.max(np.abs(rhs))), 1e-300)
    if not np.all(np.isfinite(z)) or (np.any(rhs) and residual > SOLVE_TOL * scale):
        raise LinearSolveError("Auxiliary displacement solve did not converge", residual=residual)
    return z.reshape(grid.node_shape + (2,))


def make_initial(
    model: Model,
    u0: np.ndarray,
    v0: np.ndarray,
    e0: np.ndarray,
    p0: np.ndarray,
    lam: float,
    r_margin: float,
    check: bool = True,
) -> CompatibleInitialData:
    """
    Build the λ-compatible initial velocity and stress.

    Raises:
        InitialDataError: if the input data violate a compatibility clause
        MarginViolationError: if σ0λ leaves K, i.e. λ < max|E(z0)|/r_margin
        LinearSolveError: if the auxiliary solve fails
    """
    grid, partition = model.grid, model.partition
    if check:
        check_initial_data(model, u0, v0, e0, p0, r_margin)

    sigma0 = hooke_apply(model.hooke, e0)
    trace0 = normal_trace(grid, partition, sigma0)
    v_hat = partition.scatter(-trace0)

    z0 = solve_auxiliary_displacement(model, v0)
    Ez0 = sym_gradient(grid, z0)

    magnitude = frob_norm(Ez0)
    required_lambda = float(np.max(magnitude)) / r_margin if magnitude.size else 0.0
    if lam < required_lambda:
        cell = np.unravel_index(int(np.argmax(magnitude)), magnitude.shape)
        cell = tuple(int(i) for i in cell)
        raise MarginViolationError(
            f"σ0λ leaves K at cell {cell}: λ={lam} is below the required {required_lambda:.6g}",
            cell=cell,
            required_lambda=required_lambda,
        )

    v0_lambda = v0 + v_hat / lam
    sigma0_lambda = sigma0 + Ez0 / lam

    outside = ~model.K.contains(sigma0_lambda)
    if np.any(outside):
        cell = tuple(int(i) for i in np.argwhere(outside)[0])
        raise MarginViolationError(f"σ0λ leaves K at cell {cell}", cell=cell,
                                   required_lambda=required_lambda)

    residual = compatibility_residual(model, lam, v0_lambda, sigma0_lambda)
    logger.info(f"Compatible initial data for λ={lam:g}: residual {residual:.3e}, "
                f"required λ {required_lambda:.4g}")
    return CompatibleInitialData(
        lam=lam,
        v0_lambda=v0_lambda,
        sigma0_lambda=sigma0_lambda,
        v_hat=v_hat,
        z0=z0,
        Ez0=Ez0,
        compatibility_residual=residual,
        required_lambda=required_lambda,
    )


def compatibility_residual(
    model: Model,
    lam: float,
    v: np.ndarray,
    sigma: np.ndarray,
    labels: Optional[np.ndarray] = None,
) -> float:
    """max over non-Σ boundary nodes of |S_λ v + σν|."""
    partition = model.partition
    labels = partition.labels if labels is None else labels
    s = np.where(labels == LABEL_D, lam, 1.0 / lam)
    value = s[:, None] * partition.gather(v) + normal_trace(model.grid, partition, sigma)
    keep = labels != LABEL_SIGMA
    return float(np.max(np.linalg.norm(value[keep], axis=-1))) if np.any(keep) else 0.0
