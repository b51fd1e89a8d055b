"""
Symmetric-tensor arithmetic and the isotropic Hooke operator.

Symmetric matrices are numpy arrays of shape (..., n, n) with n in {2, 3};
every function broadcasts over leading axes. Vectors are arrays of shape
(..., n).
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from dynplast.common.exceptions import ConfigurationError, DimensionError

logger = logging.getLogger(__name__)

SUPPORTED_DIMS = (2, 3)


def _check_dim(n: int) -> None:
    if n not in SUPPORTED_DIMS:
        raise DimensionError(f"Unsupported dimension n={n}", expected=SUPPORTED_DIMS, actual=n)


def identity(n: int) -> np.ndarray:
    _check_dim(n)
    return np.eye(n)


def trace(A: np.ndarray) -> np.ndarray:
    return np.trace(A, axis1=-2, axis2=-1)


def frob_dot(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Frobenius product A:B over the last two axes."""
    return np.einsum("...ij,...ij->...", A, B)


def frob_norm(A: np.ndarray) -> np.ndarray:
    return np.sqrt(np.maximum(frob_dot(A, A), 0.0))


def sym(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def sym_outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Symmetric tensor product a ⊙ b = (a bᵀ + b aᵀ)/2.

    Raises:
        DimensionError: if the trailing dimensions of a and b differ
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError("sym_outer operands differ in dimension",
                             expected=a.shape[-1], actual=b.shape[-1])
    _check_dim(a.shape[-1])
    outer = a[..., :, None] * b[..., None, :]
    return 0.5 * (outer + np.swapaxes(outer, -1, -2))


def dev_split(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split A into its deviatoric part and its mean normal value.

    Returns:
        (A_D, mean) with A_D trace-free and A_D + mean·Id = A
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[-1]
    _check_dim(n)
    mean = trace(A) / n
    A_D = A - mean[..., None, None] * np.eye(n)
    return A_D, mean


def to_mandel(A: np.ndarray) -> np.ndarray:
    """Isometric vector coordinates of a symmetric matrix (off-diagonals times √2)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[-1]
    _check_dim(n)
    r2 = np.sqrt(2.0)
    if n == 2:
        return np.stack([A[..., 0, 0], A[..., 1, 1], r2 * A[..., 0, 1]], axis=-1)
    return np.stack([A[..., 0, 0], A[..., 1, 1], A[..., 2, 2],
                     r2 * A[..., 1, 2], r2 * A[..., 0, 2], r2 * A[..., 0, 1]], axis=-1)


def from_mandel(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    if m not in (3, 6):
        raise DimensionError("Mandel vectors have 3 or 6 components", expected=(3, 6), actual=m)
    s = 1.0 / np.sqrt(2.0)
    if m == 3:
        A = np.empty(x.shape[:-1] + (2, 2))
        A[..., 0, 0] = x[..., 0]
        A[..., 1, 1] = x[..., 1]
        A[..., 0, 1] = A[..., 1, 0] = s * x[..., 2]
        return A
    A = np.empty(x.shape[:-1] + (3, 3))
    A[..., 0, 0] = x[..., 0]
    A[..., 1, 1] = x[..., 1]
    A[..., 2, 2] = x[..., 2]
    A[..., 1, 2] = A[..., 2, 1] = s * x[..., 3]
    A[..., 0, 2] = A[..., 2, 0] = s * x[..., 4]
    A[..., 0, 1] = A[..., 1, 0] = s * x[..., 5]
    return A


@dataclass(frozen=True)
class HookeTensor:
    """
    Isotropic elasticity tensor A ξ = λ (tr ξ) Id + 2µ ξ.

    Ellipticity (µ > 0, nλ + 2µ > 0) is validated on construction.
    """
    lame_lambda: float
    lame_mu: float
    dim: int = 2

    def __post_init__(self):
        _check_dim(self.dim)
        if not self.lame_mu > 0:
            raise ConfigurationError(f"Lamé µ must be positive, got {self.lame_mu}", key="hooke.mu")
        if not self.dim * self.lame_lambda + 2.0 * self.lame_mu > 0:
            raise ConfigurationError(
                f"Ellipticity requires nλ + 2µ > 0, got {self.dim * self.lame_lambda + 2.0 * self.lame_mu}",
                key="hooke.lambda",
            )

    @property
    def bulk_modulus(self) -> float:
        """Eigenvalue of A on spherical matrices, nλ + 2µ."""
        return self.dim * self.lame_lambda + 2.0 * self.lame_mu

    @property
    def alpha(self) -> float:
        return min(2.0 * self.lame_mu, self.bulk_modulus)

    @property
    def beta(self) -> float:
        return max(2.0 * self.lame_mu, self.bulk_modulus)

    @property
    def p_wave_speed(self) -> float:
        # unit density
        return float(np.sqrt(self.lame_lambda + 2.0 * self.lame_mu))

    @property
    def s_wave_speed(self) -> float:
        return float(np.sqrt(self.lame_mu))

    def apply(self, e: np.ndarray) -> np.ndarray:
        return hooke_apply(self, e)

    def inverse(self, sigma: np.ndarray) -> np.ndarray:
        return hooke_inverse(self, sigma)


def _check_tensor(A: HookeTensor, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape[-2:] != (A.dim, A.dim):
        raise DimensionError("Tensor shape does not match Hooke dimension",
                             expected=(A.dim, A.dim), actual=X.shape[-2:])
    return X


def hooke_apply(A: HookeTensor, e: np.ndarray) -> np.ndarray:
    e = _check_tensor(A, e)
    return A.lame_lambda * trace(e)[..., None, None] * np.eye(A.dim) + 2.0 * A.lame_mu * e


def hooke_inverse(A: HookeTensor, sigma: np.ndarray) -> np.ndarray:
    """Closed-form inverse e = σ/(2µ) − λ tr σ / (2µ(nλ+2µ)) Id."""
    sigma = _check_tensor(A, sigma)
    mu = A.lame_mu
    coeff = A.lame_lambda / (2.0 * mu * A.bulk_modulus)
    return sigma / (2.0 * mu) - coeff * trace(sigma)[..., None, None] * np.eye(A.dim)


def hooke_power(A: HookeTensor, s: float, xi: np.ndarray) -> np.ndarray:
    """Apply A^s using the deviatoric/spherical eigen-split of the isotropic tensor."""
    xi = _check_tensor(A, xi)
    xi_D, mean = dev_split(xi)
    return (2.0 * A.lame_mu) ** s * xi_D + A.bulk_modulus ** s * mean[..., None, None] * np.eye(A.dim)


def quadratic_Q(A: HookeTensor, e: np.ndarray) -> np.ndarray:
    """Elastic energy density Q(e) = λ/2 (tr e)² + µ|e|²."""
    e = _check_tensor(A, e)
    return 0.5 * A.lame_lambda * trace(e) ** 2 + A.lame_mu * frob_dot(e, e)


def hooke_metric_norm(A: HookeTensor, xi: np.ndarray) -> np.ndarray:
    """Complementary-energy norm sqrt(A⁻¹ξ : ξ)."""
    return np.sqrt(np.maximum(frob_dot(hooke_inverse(A, xi), xi), 0.0))
