"""
Boundary geometry of the relaxed dissipative condition.

The set −Kν = {−τν : τ ∈ K} of admissible (sign-reversed) tractions at a
boundary point with unit normal ν, the Euclidean projection onto it, the
relaxed boundary energy ψ and its gradient, and the boundary dissipation
density H(−z⊙ν).

Vectors broadcast over leading axes: ν and z have shape (..., n).
"""

import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Union

import numpy as np
from scipy.optimize import linprog, minimize

from dynplast.common.exceptions import ConfigurationError, ConvergenceError
from dynplast.core.algebra import from_mandel, sym_outer
from dynplast.geometry.sets import (
    MEMBERSHIP_TOL,
    Ball,
    DeviatoricCylinder,
    ElasticitySet,
    HalfspaceIntersection,
)

logger = logging.getLogger(__name__)

LIFT_TOL = 1e-10
LIFT_MAX_ITER = 100_000
NEWTON_MAX_ITER = 200
UNIT_TOL = 1e-12


@dataclass(frozen=True)
class BoundaryWeight:
    """Scalar boundary matrix S = s·Id at a boundary point; s = inf is the exact Dirichlet limit."""
    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise ConfigurationError(f"Boundary weight must be positive, got {self.s}", key="bc_mode.lambda")

    @classmethod
    def for_label(cls, lam: float, label: str) -> "BoundaryWeight":
        """λ on Γ_D, 1/λ on Γ_N."""
        if label == "D":
            return cls(lam)
        if label == "N":
            return cls(1.0 / lam)
        raise ConfigurationError(f"No boundary weight for label {label!r}", key="partition")


Weight = Union[BoundaryWeight, float]


def _s(w: Weight) -> float:
    return w.s if isinstance(w, BoundaryWeight) else float(w)


def _col(x) -> np.ndarray:
    return np.asarray(x)[..., None]


class Membership(IntEnum):
    INSIDE = 0
    BOUNDARY = 1
    OUTSIDE = 2


def _split(nu: np.ndarray, z: np.ndarray):
    nu = np.asarray(nu, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(np.linalg.norm(nu, axis=-1) - 1.0) > UNIT_TOL):
        raise ConfigurationError("Boundary normal must be a unit vector", key="normal")
    a = np.sum(z * nu, axis=-1)
    t = z - _col(a) * nu
    return nu, z, a, t


def _tangential_norm(t: np.ndarray) -> np.ndarray:
    return np.linalg.norm(t, axis=-1)


def min_norm_lift(nu: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Minimum-Frobenius-norm τ with −τν = z: τ* = −(2 z⊙ν − (z·ν) ν⊗ν)."""
    nu, z, a, _ = _split(nu, z)
    return -(2.0 * sym_outer(z, nu) - np.asarray(a)[..., None, None] * nu[..., :, None] * nu[..., None, :])


# MEMBERSHIP

def classify_minus_Knu(
    K: ElasticitySet,
    nu: np.ndarray,
    z: np.ndarray,
    band: float = MEMBERSHIP_TOL,
):
    """
    Classify z against −Kν.

    Returns:
        A Membership for a single point, an int array of Membership codes for a batch
    """
    nu, z, a, t = _split(nu, z)
    if isinstance(K, Ball):
        excess = np.sqrt(a ** 2 + 2.0 * _tangential_norm(t) ** 2) - K.radius
    elif isinstance(K, DeviatoricCylinder):
        excess = _tangential_norm(t) - K.radius / np.sqrt(2.0)
    elif isinstance(K, HalfspaceIntersection):
        excess = _halfspace_slack(K, nu, z)
    else:
        excess = np.linalg.norm(project_minus_Knu(K, nu, 1.0, z) - z, axis=-1) - band
    codes = np.where(excess > band, Membership.OUTSIDE,
                     np.where(excess >= -band, Membership.BOUNDARY, Membership.INSIDE))
    if codes.ndim == 0:
        return Membership(int(codes))
    return codes.astype(int)


def _halfspace_slack(K: HalfspaceIntersection, nu: np.ndarray, z: np.ndarray) -> np.ndarray:
    # min t subject to N_i:τ − c_i ≤ t and τν = −z, in Mandel coordinates of τ
    n = K.dim
    m, k = K._mandel.shape
    basis = from_mandel(np.eye(k))
    A_ub = np.hstack([K._mandel, -np.ones((m, 1))])
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    bounds = [(None, None)] * k + [(-1.0, None)]
    flat_z = z.reshape(-1, n)
    flat_nu = np.broadcast_to(nu, z.shape).reshape(-1, n)
    out = np.empty(flat_z.shape[0])
    for idx, (nv, zv) in enumerate(zip(flat_nu, flat_z)):
        A_eq = np.hstack([(basis @ nv).T, np.zeros((n, 1))])
        res = linprog(cost, A_ub=A_ub, b_ub=K.offsets, A_eq=A_eq, b_eq=-zv,
                      bounds=bounds, method="highs")
        if res.status == 2:
            out[idx] = np.inf
        elif res.status == 0:
            out[idx] = res.x[-1]
        else:
            raise ConvergenceError(f"Feasibility LP failed: {res.message}", algorithm="linprog")
    return out.reshape(z.shape[:-1])


def minus_Knu_membership(K: ElasticitySet, nu: np.ndarray, z: np.ndarray, band: float = MEMBERSHIP_TOL):
    """True iff z ∈ −Kν; points within the tolerance band count as inside."""
    codes = classify_minus_Knu(K, nu, z, band)
    if isinstance(codes, Membership):
        return codes != Membership.OUTSIDE
    return codes != int(Membership.OUTSIDE)


# PROJECTION

def project_minus_Knu(K: ElasticitySet, nu: np.ndarray, w: Weight, y: np.ndarray) -> np.ndarray:
    """
    Euclidean projection of y onto −Kν.

    For scalar S the S⁻¹-metric projection coincides with the Euclidean one,
    so the weight does not enter.
    """
    nu, y, a, t = _split(nu, y)
    if isinstance(K, Ball):
        return _project_ellipsoid(nu, a, t, K.radius)
    if isinstance(K, DeviatoricCylinder):
        tn = _tangential_norm(t)
        cap = K.radius / np.sqrt(2.0)
        scale = np.where(tn > cap, cap / np.where(tn > 0, tn, 1.0), 1.0)
        return _col(a) * nu + _col(scale) * t
    return _project_lift_batch(K, nu, y)


def _project_ellipsoid(nu, a0, t0, r):
    # ellipsoid a² + 2|t|² ≤ r²: a = a0/(1+γ), t = t0/(1+2γ)
    tn2 = np.sum(t0 * t0, axis=-1)
    g0 = a0 ** 2 + 2.0 * tn2 - r ** 2
    gamma = np.zeros_like(a0)
    outside = g0 > 0
    if np.any(outside):
        for _ in range(NEWTON_MAX_ITER):
            d1 = 1.0 + gamma
            d2 = 1.0 + 2.0 * gamma
            g = a0 ** 2 / d1 ** 2 + 2.0 * tn2 / d2 ** 2 - r ** 2
            active = outside & (g > 1e-15 * r ** 2)
            if not np.any(active):
                break
            dg = -2.0 * a0 ** 2 / d1 ** 3 - 8.0 * tn2 / d2 ** 3
            gamma = np.where(active, gamma - g / dg, gamma)
        else:
            raise ConvergenceError("Ellipsoid projection did not converge",
                                   algorithm="newton", iterations=NEWTON_MAX_ITER)
    a = a0 / (1.0 + gamma)
    t = t0 / _col(1.0 + 2.0 * gamma)
    out = _col(a) * nu + t
    # clip the last rounding step back onto the ellipsoid
    level = np.sqrt(a ** 2 + 2.0 * np.sum(t * t, axis=-1))
    return out * _col(np.minimum(1.0, r / np.where(level > 0, level, 1.0)))


def _project_lift_batch(K, nu, y):
    flat_y = y.reshape(-1, y.shape[-1])
    flat_nu = np.broadcast_to(nu, y.shape).reshape(-1, y.shape[-1])
    out = np.empty_like(flat_y)
    for idx, (nv, yv) in enumerate(zip(flat_nu, flat_y)):
        out[idx] = _project_lift(K, nv, yv)
    return out.reshape(y.shape)


def _project_lift(K: ElasticitySet, nu: np.ndarray, y: np.ndarray,
                  tol: float = LIFT_TOL, max_iter: int = LIFT_MAX_ITER) -> np.ndarray:
    """Projected gradient on the matrix lift: min ½|y + τν|² over τ ∈ K, returns −τ*ν."""
    n = nu.size
    tau = np.zeros((n, n))
    w_prev = np.zeros(n)
    scale = 1.0 + np.linalg.norm(y)
    for it in range(max_iter):
        grad = sym_outer(y + tau @ nu, nu)
        tau = K.project(tau - grad)
        w = -(tau @ nu)
        if it > 0 and np.linalg.norm(w - w_prev) <= tol * scale:
            return w
        w_prev = w
    raise ConvergenceError("Lift projection onto −Kν exceeded its iteration cap",
                           algorithm="projected_gradient", iterations=max_iter,
                           achieved=float(np.linalg.norm(w - w_prev)))


# RELAXED BOUNDARY ENERGY

def psi_eval(K: ElasticitySet, nu: np.ndarray, w: Weight, z: np.ndarray) -> np.ndarray:
    """ψ(z) = inf_w ½s|w|² + H((w−z)⊙ν), evaluated as P·z − |P|²/(2s) with P = P_{−Kν}(s z)."""
    s = _s(w)
    z = np.asarray(z, dtype=float)
    P = project_minus_Knu(K, nu, w, s * z)
    return np.maximum(np.sum(P * z, axis=-1) - np.sum(P * P, axis=-1) / (2.0 * s), 0.0)


def psi_grad(K: ElasticitySet, nu: np.ndarray, w: Weight, z: np.ndarray) -> np.ndarray:
    s = _s(w)
    return project_minus_Knu(K, nu, w, s * np.asarray(z, dtype=float))


def psi_eval_direct(K: ElasticitySet, nu: np.ndarray, w: Weight, z: np.ndarray) -> float:
    """
    ψ at a single point by direct minimisation over w.

    Sets with H = +∞ off trace-free arguments (the deviatoric cylinder) are
    minimised on the slice (w−z)·ν = 0 where the integrand is finite.

    Raises:
        ConvergenceError: if the minimiser search fails; carries the achieved bound
    """
    s = _s(w)
    nu = np.asarray(nu, dtype=float)
    z = np.asarray(z, dtype=float)
    n = nu.size

    def boundary_term(y):
        return float(K.support(-sym_outer(y, nu)))

    if isinstance(K, DeviatoricCylinder):
        # orthonormal tangent basis from the null space of ν
        _, _, vt = np.linalg.svd(nu[None, :])
        tangents = vt[1:]

        def objective(c):
            y = c @ tangents
            wv = z + y
            return 0.5 * s * wv @ wv + boundary_term(-y)
        x0 = np.zeros(n - 1)
    else:
        def objective(wv):
            return 0.5 * s * wv @ wv + boundary_term(z - wv)
        x0 = np.zeros(n)

    res = minimize(objective, x0, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20_000, "maxfev": 40_000})
    if not res.success:
        raise ConvergenceError(f"Direct ψ minimisation failed: {res.message}",
                               algorithm="nelder-mead", iterations=int(res.nit),
                               achieved=float(res.fun))
    return float(res.fun)


def boundary_dissipation_density(K: ElasticitySet, nu: np.ndarray, z: np.ndarray) -> np.ndarray:
    """H(−z⊙ν), the support function of −Kν at z."""
    nu, z, _, _ = _split(nu, z)
    return K.support(-sym_outer(z, nu))


def implicit_boundary_traction(
    K: ElasticitySet,
    nu: np.ndarray,
    s: Union[float, np.ndarray],
    beta: np.ndarray,
    v_star: np.ndarray,
):
    """
    Solve x + β P_{−Kν}(s x) = v* per boundary node.

    The solution is P = P_{−Kν}(s' v*) with s' = s/(1+sβ) (s' = 1/β for s = ∞),
    x = v* − βP, and the traction is T = −P.

    Returns:
        (x, T)
    """
    s = np.asarray(s, dtype=float)
    beta = np.asarray(beta, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        s_eff = np.where(np.isinf(s), 1.0 / beta, s / (1.0 + s * beta))
    y = _col(s_eff) * v_star
    P = project_minus_Knu(K, nu, 1.0, y)
    x = v_star - _col(beta) * P
    # exact Dirichlet nodes with an inactive constraint stick
    stuck = np.isinf(s) & (np.linalg.norm(P - y, axis=-1) <= 1e-14 * np.linalg.norm(y, axis=-1))
    x[stuck] = 0.0
    return x, -P
