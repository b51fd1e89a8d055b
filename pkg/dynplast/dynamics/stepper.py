"""
Explicit predictor / return-map step.

1. velocity predictor  v* = v + dt (div(σ, T=0) + f(t + dt/2))
2. boundary traction   solved per boundary node from x + β P_{−Kν}(s x) = v*,
                       β = dt·ds/m, so that T + P_{−Kν}(S v⁺) = 0 holds at v⁺
3. strain increment    Δε = dt E v⁺,  σ_trial = σ + AΔε
4. return map          σ⁺ = P_K(σ_trial) in the A⁻¹ metric, Δp = A⁻¹(σ_trial − σ⁺)
5. positions           u⁺ = u + dt v⁺, Γ_D slip accumulates dt v⁺
"""

import logging
from typing import Optional

import numpy as np

from dynplast.common.exceptions import CFLViolationError, StepAbortError
from dynplast.core.algebra import HookeTensor, hooke_apply, hooke_inverse
from dynplast.discretization.grid import Grid
from dynplast.discretization.operators import sym_gradient, sym_gradient_adjoint
from dynplast.dynamics.state import BCMode, Model, State, StepParams, StepRecord
from dynplast.geometry.boundary import implicit_boundary_traction

logger = logging.getLogger(__name__)


def cfl_dt(grid: Grid, hooke: HookeTensor, cfl: float) -> float:
    """dt = cfl·h/sqrt(λ+2µ) at unit density."""
    return cfl * grid.h / hooke.p_wave_speed


def check_cfl(grid: Grid, hooke: HookeTensor, params: StepParams) -> None:
    limit = cfl_dt(grid, hooke, params.cfl)
    if params.dt > limit * (1.0 + 1e-12):
        raise CFLViolationError(
            f"Time step {params.dt:.6g} exceeds the stability bound {limit:.6g}",
            reason="cfl",
            details={"dt": params.dt, "dt_max": limit, "cfl": params.cfl},
        )


def velocity_scale(model: Model, v0: np.ndarray, sigma0: np.ndarray) -> float:
    """Reference speed of the blow-up guard: max(‖v0‖∞, ‖σ0‖∞/c_p, 1)."""
    v_max = float(np.max(np.abs(v0))) if v0.size else 0.0
    s_max = float(np.max(np.abs(sigma0))) if sigma0.size else 0.0
    return max(v_max, s_max / model.hooke.p_wave_speed, 1.0)


def step(
    model: Model,
    state: State,
    params: StepParams,
    mode: BCMode,
    f: Optional[np.ndarray] = None,
    step_index: int = 0,
) -> StepRecord:
    """
    Advance one step.

    Args:
        f: nodal body force at the step midpoint (None for no force)

    Raises:
        StepAbortError: if the velocity exceeds the blow-up guard
    """
    grid, partition, hooke, K = model.grid, model.partition, model.hooke, model.K
    dt = params.dt
    m = model.nodal_weights

    force = -grid.h ** 2 * sym_gradient_adjoint(grid, state.sigma)
    acc = force / m[..., None]
    if f is not None:
        acc = acc + f
    v_star = state.v + dt * acc

    beta = dt * partition.ds / model.boundary_weights
    x, traction = implicit_boundary_traction(
        K, partition.normals, mode.weights(partition), beta, partition.gather(v_star))
    v_new = v_star.copy()
    v_new[partition.nodes[:, 0], partition.nodes[:, 1]] = x

    v_max = float(np.max(np.abs(v_new)))
    if not np.isfinite(v_max) or v_max > params.blowup_factor * params.velocity_scale:
        raise StepAbortError(
            f"Velocity {v_max:.3e} exceeds the blow-up guard at step {step_index}",
            step=step_index,
            reason="blow-up",
            details={"limit": params.blowup_factor * params.velocity_scale},
        )

    de = dt * sym_gradient(grid, v_new)
    sigma_trial = state.sigma + hooke_apply(hooke, de)
    sigma_new = sigma_trial.copy()
    outside = ~K.contains(sigma_trial, tol=0.0)
    if np.any(outside):
        sigma_new[outside] = K.project(sigma_trial[outside], hooke)
    dp = np.zeros_like(de)
    if np.any(outside):
        dp[outside] = hooke_inverse(hooke, sigma_trial[outside] - sigma_new[outside])

    pD = state.pD.copy()
    pD[partition.d_mask] += dt * x[partition.d_mask]

    new_state = State(
        t=state.t + dt,
        u=state.u + dt * v_new,
        v=v_new,
        e=state.e + de - dp,
        p=state.p + dp,
        sigma=sigma_new,
        pD=pD,
    )
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"step {step_index}: t={new_state.t:.6g}, |v|max={v_max:.3e}, "
                     f"yielding cells={int(np.sum(outside))}")
    return StepRecord(step=step_index, state=new_state, dt=dt, de=de, dp=dp,
                      traction=traction, v_star=partition.gather(v_star))
