"""
Elasticity sets K: closed convex subsets of the symmetric matrices with 0 in
their interior.

Each variant provides its support function H, membership, metric projection
(Frobenius or the complementary-energy metric of a Hooke tensor), the
distance to the complement of K, and the support function of K ∩ B_µ.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import linprog, minimize

from dynplast.common.exceptions import ConfigurationError, ConvergenceError, DimensionError
from dynplast.core.algebra import (
    HookeTensor,
    dev_split,
    frob_dot,
    frob_norm,
    hooke_power,
    to_mandel,
    trace,
)

logger = logging.getLogger(__name__)

Metric = Optional[Union[str, HookeTensor]]

MEMBERSHIP_TOL = 1e-9
DYKSTRA_TOL = 1e-12
DYKSTRA_MAX_CYCLES = 100_000
NEWTON_MAX_ITER = 200
# relative size of tr q below which q counts as trace-free
TRACE_TOL = 1e-9


def _is_hooke(metric: Metric) -> bool:
    return isinstance(metric, HookeTensor)


class ElasticitySet(ABC):
    """Closed convex set of admissible stresses."""

    dim: int

    @property
    @abstractmethod
    def inradius(self) -> float:
        """Radius of a Frobenius ball centred at 0 contained in K."""

    @abstractmethod
    def support(self, q: np.ndarray) -> np.ndarray:
        """H(q) = sup_{τ∈K} τ:q, possibly +inf."""

    @abstractmethod
    def interior_margin(self, sigma: np.ndarray) -> np.ndarray:
        """Signed Frobenius distance from σ to the complement of K."""

    @abstractmethod
    def project(self, sigma: np.ndarray, metric: Metric = None) -> np.ndarray:
        """Metric projection onto K."""

    @abstractmethod
    def restricted_support(self, p: np.ndarray, mu: float) -> np.ndarray:
        """sup over τ ∈ K with |τ| ≤ µ of τ:p."""

    def contains(self, sigma: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        return self.interior_margin(sigma) >= -tol

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-2:] != (self.dim, self.dim):
            raise DimensionError("Matrix shape does not match elasticity set",
                                 expected=(self.dim, self.dim), actual=X.shape[-2:])
        return X

    def describe(self) -> dict:
        return {"kind": type(self).__name__}


@dataclass(frozen=True)
class Ball(ElasticitySet):
    """Frobenius ball |σ| ≤ radius."""
    radius: float
    dim: int = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigurationError(f"Ball radius must be positive, got {self.radius}",
                                     key="elasticity_set.radius")

    @property
    def inradius(self) -> float:
        return self.radius

    def support(self, q):
        return self.radius * frob_norm(self._check(q))

    def interior_margin(self, sigma):
        return self.radius - frob_norm(self._check(sigma))

    def project(self, sigma, metric=None):
        sigma = self._check(sigma)
        norm = frob_norm(sigma)
        outside = norm > self.radius
        if not np.any(outside):
            return sigma.copy()
        out = sigma.copy()
        if not _is_hooke(metric):
            out[outside] = sigma[outside] * (self.radius / norm[outside])[..., None, None]
            return out
        out[outside] = self._project_hooke(sigma[outside], metric)
        return out

    def _project_hooke(self, sigma, A: HookeTensor):
        # τ = (I + γA)⁻¹σ, γ ≥ 0 the root of |τ(γ)|² = r², found by Newton from the left
        s_D, mean = dev_split(sigma)
        d = frob_dot(s_D, s_D)
        sph = self.dim * mean ** 2
        two_mu, b = 2.0 * A.lame_mu, A.bulk_modulus
        r2 = self.radius ** 2
        gamma = np.zeros_like(d)
        for it in range(NEWTON_MAX_ITER):
            a1 = 1.0 + two_mu * gamma
            a2 = 1.0 + b * gamma
            f = d / a1 ** 2 + sph / a2 ** 2 - r2
            if np.all(f <= 1e-15 * r2):
                break
            df = -2.0 * two_mu * d / a1 ** 3 - 2.0 * b * sph / a2 ** 3
            gamma = gamma - np.where(f > 0, f / df, 0.0)
        else:
            raise ConvergenceError("Hooke-metric ball projection did not converge",
                                   algorithm="newton", iterations=NEWTON_MAX_ITER,
                                   achieved=float(np.max(f)))
        tau = (s_D / (1.0 + two_mu * gamma)[..., None, None]
               + (mean / (1.0 + b * gamma))[..., None, None] * np.eye(self.dim))
        norm = frob_norm(tau)
        return tau * np.minimum(1.0, self.radius / norm)[..., None, None]

    def restricted_support(self, p, mu):
        return min(self.radius, mu) * frob_norm(self._check(p))

    def describe(self):
        return {"kind": "ball", "radius": self.radius, "dim": self.dim}


@dataclass(frozen=True)
class DeviatoricCylinder(ElasticitySet):
    """Cylinder |σ_D| ≤ radius, unbounded along the identity."""
    radius: float
    dim: int = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigurationError(f"Cylinder radius must be positive, got {self.radius}",
                                     key="elasticity_set.radius")

    @property
    def inradius(self) -> float:
        return self.radius

    def support(self, q):
        q = self._check(q)
        q_D, mean = dev_split(q)
        norm = frob_norm(q)
        spherical = np.abs(trace(q)) > TRACE_TOL * norm
        return np.where(spherical, np.inf, self.radius * frob_norm(q_D))

    def interior_margin(self, sigma):
        s_D, _ = dev_split(self._check(sigma))
        return self.radius - frob_norm(s_D)

    def project(self, sigma, metric=None):
        # the isotropic metric decouples spherical and deviatoric parts, so both
        # metrics give the radial return on the deviator
        sigma = self._check(sigma)
        s_D, mean = dev_split(sigma)
        norm = frob_norm(s_D)
        scale = np.where(norm > self.radius, self.radius / np.where(norm > 0, norm, 1.0), 1.0)
        return s_D * scale[..., None, None] + mean[..., None, None] * np.eye(self.dim)

    def restricted_support(self, p, mu):
        p = self._check(p)
        p_D, mean = dev_split(p)
        pd = frob_norm(p_D)
        ps = np.sqrt(self.dim) * np.abs(mean)
        pn = np.sqrt(pd ** 2 + ps ** 2)
        if mu <= self.radius:
            return mu * pn
        # maximise a|p_D| + b|p_S| over a ≤ k, a² + b² ≤ µ²
        with np.errstate(invalid="ignore", divide="ignore"):
            a_free = np.where(pn > 0, mu * pd / pn, 0.0)
        capped = self.radius * pd + np.sqrt(mu ** 2 - self.radius ** 2) * ps
        return np.where(a_free <= self.radius, mu * pn, capped)

    def describe(self):
        return {"kind": "deviatoric_cylinder", "radius": self.radius, "dim": self.dim}


@dataclass(frozen=True, eq=False)
class HalfspaceIntersection(ElasticitySet):
    """Intersection of halfspaces N_i:σ ≤ c_i with |N_i| = 1 and c_i > 0."""
    normals: np.ndarray
    offsets: np.ndarray
    dim: int = 2
    _mandel: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        normals = np.asarray(self.normals, dtype=float)
        offsets = np.asarray(self.offsets, dtype=float)
        if normals.ndim != 3 or normals.shape[1:] != (self.dim, self.dim):
            raise ConfigurationError("Halfspace normals must have shape (m, n, n)",
                                     key="elasticity_set.normals")
        if offsets.shape != (normals.shape[0],):
            raise ConfigurationError("One offset per halfspace normal is required",
                                     key="elasticity_set.offsets")
        normals = 0.5 * (normals + np.swapaxes(normals, -1, -2))
        lengths = frob_norm(normals)
        if np.any(lengths == 0):
            raise ConfigurationError("Halfspace normals must be nonzero", key="elasticity_set.normals")
        normals = normals / lengths[:, None, None]
        offsets = offsets / lengths
        if np.any(offsets <= 0):
            raise ConfigurationError("Halfspace offsets must be positive (0 interior to K)",
                                     key="elasticity_set.offsets")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "_mandel", to_mandel(normals))

    @property
    def inradius(self) -> float:
        return float(np.min(self.offsets))

    def support(self, q):
        q = self._check(q)
        flat = to_mandel(q).reshape(-1, self._mandel.shape[1])
        out = np.empty(flat.shape[0])
        for idx, qv in enumerate(flat):
            out[idx] = self._support_lp(qv)
        return out.reshape(q.shape[:-2])

    def _support_lp(self, qv: np.ndarray) -> float:
        if not np.any(qv):
            return 0.0
        res = linprog(-qv, A_ub=self._mandel, b_ub=self.offsets,
                      bounds=[(None, None)] * qv.size, method="highs")
        if res.status == 0:
            return float(-res.fun)
        if res.status == 3:
            return np.inf
        raise ConvergenceError(f"Support LP failed: {res.message}", algorithm="linprog")

    def interior_margin(self, sigma):
        sigma = self._check(sigma)
        values = np.einsum("kij,...ij->...k", self.normals, sigma)
        return np.min(self.offsets - values, axis=-1)

    def project(self, sigma, metric=None):
        sigma = self._check(sigma)
        outside = ~self.contains(sigma, tol=0.0)
        out = sigma.copy()
        if not np.any(outside):
            return out
        if _is_hooke(metric):
            # Frobenius projection in y = A^{-1/2}τ coordinates
            scaled = hooke_power(metric, 0.5, self.normals)
            lengths = frob_norm(scaled)
            y = hooke_power(metric, -0.5, sigma[outside])
            y = _dykstra(y, scaled / lengths[:, None, None], self.offsets / lengths)
            out[outside] = hooke_power(metric, 0.5, y)
        else:
            out[outside] = _dykstra(sigma[outside], self.normals, self.offsets)
        return out

    def restricted_support(self, p, mu):
        p = self._check(p)
        flat = to_mandel(p).reshape(-1, self._mandel.shape[1])
        out = np.empty(flat.shape[0])
        for idx, pv in enumerate(flat):
            out[idx] = self._restricted_nlp(pv, mu)
        return out.reshape(p.shape[:-2])

    def _restricted_nlp(self, pv: np.ndarray, mu: float) -> float:
        if not np.any(pv):
            return 0.0
        A, c = self._mandel, self.offsets
        res = minimize(
            lambda x: -pv @ x,
            np.zeros_like(pv),
            jac=lambda x: -pv,
            method="SLSQP",
            constraints=[
                {"type": "ineq", "fun": lambda x: c - A @ x, "jac": lambda x: -A},
                {"type": "ineq", "fun": lambda x: mu ** 2 - x @ x, "jac": lambda x: -2.0 * x},
            ],
            options={"ftol": 1e-14, "maxiter": 500},
        )
        if not res.success:
            raise ConvergenceError(f"Restricted support search failed: {res.message}",
                                   algorithm="slsqp", iterations=int(res.nit),
                                   achieved=float(-res.fun))
        return float(-res.fun)

    def describe(self):
        return {"kind": "halfspaces", "normals": self.normals.tolist(),
                "offsets": self.offsets.tolist(), "dim": self.dim}


def _dykstra(
    x: np.ndarray,
    normals: np.ndarray,
    offsets: np.ndarray,
    tol: float = DYKSTRA_TOL,
    max_cycles: int = DYKSTRA_MAX_CYCLES,
) -> np.ndarray:
    """Cyclic Dykstra projection of a batch of matrices onto ∩_i {N_i:x ≤ c_i} (|N_i| = 1)."""
    x = x.copy()
    scale = 1.0 + frob_norm(x)
    corrections = np.zeros((normals.shape[0],) + x.shape)
    for cycle in range(max_cycles):
        x_prev = x.copy()
        for i, (N, c) in enumerate(zip(normals, offsets)):
            y = x + corrections[i]
            excess = np.maximum(frob_dot(y, N) - c, 0.0)
            x = y - excess[..., None, None] * N
            corrections[i] = y - x
        change = frob_norm(x - x_prev)
        violation = np.max(np.einsum("kij,...ij->...k", normals, x) - offsets, axis=-1)
        if np.all(change <= tol * scale) and np.all(violation <= tol * scale):
            logger.debug(f"Dykstra converged after {cycle + 1} cycles")
            return x
    raise ConvergenceError("Dykstra projection exceeded its cycle cap",
                           algorithm="dykstra", iterations=max_cycles,
                           achieved=float(np.max(change)))


def project_K(K: ElasticitySet, sigma: np.ndarray, metric: Metric = None) -> np.ndarray:
    """Project σ onto K in the Frobenius metric (metric=None/"frobenius") or a Hooke metric."""
    if metric is not None and not _is_hooke(metric) and metric != "frobenius":
        raise ConfigurationError(f"Unknown projection metric {metric!r}")
    return K.project(sigma, None if metric == "frobenius" else metric)


def support_H(K: ElasticitySet, q: np.ndarray) -> np.ndarray:
    return K.support(q)


def halfspaces_from_lists(
    normals: Sequence[Sequence[Sequence[float]]],
    offsets: Sequence[float],
    dim: int = 2,
) -> HalfspaceIntersection:
    return HalfspaceIntersection(np.asarray(normals, dtype=float), np.asarray(offsets, dtype=float), dim)
