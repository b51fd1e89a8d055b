"""
Discrete symmetric gradient, its adjoint divergence and boundary quadrature.

The divergence is defined from the gradient so that for every nodal field u

    Σ_cells σ:Eu h² + Σ_nodes m div·u = Σ_bnodes T·u ds

holds to rounding, with m the lumped nodal weights.
"""

import logging

import numpy as np
from scipy import sparse

from dynplast.common.exceptions import ConfigurationError, DimensionError
from dynplast.core.algebra import frob_dot
from dynplast.discretization.grid import LABEL_D, LABEL_N, BoundaryPartition, Grid

logger = logging.getLogger(__name__)


def _gradient(grid: Grid, u: np.ndarray) -> np.ndarray:
    """Cellwise Du of the bilinear interpolant averaged over the cell, shape (nx, ny, 2, 2)."""
    h = grid.h
    ll, lr = u[:-1, :-1], u[1:, :-1]
    ul, ur = u[:-1, 1:], u[1:, 1:]
    dx = (lr + ur - ll - ul) / (2.0 * h)
    dy = (ul + ur - ll - lr) / (2.0 * h)
    return np.stack([dx, dy], axis=-1)


def sym_gradient(grid: Grid, u: np.ndarray) -> np.ndarray:
    """Eu = (Du + Duᵀ)/2 per cell; exact for affine u."""
    u = grid.check_vector_field(u, "displacement")
    D = _gradient(grid, u)
    return 0.5 * (D + np.swapaxes(D, -1, -2))


def sym_gradient_adjoint(grid: Grid, sigma: np.ndarray) -> np.ndarray:
    """
    Nodal field F with Σ_c σ:Eu = Σ_k F_k·u_k for every u.

    Quadrature weights are not included.
    """
    sigma = grid.check_sym_field(sigma, "stress")
    h = grid.h
    qx = sigma[..., :, 0] / (2.0 * h)
    qy = sigma[..., :, 1] / (2.0 * h)
    F = np.zeros(grid.node_shape + (2,))
    F[1:, :-1] += qx - qy
    F[1:, 1:] += qx + qy
    F[:-1, :-1] += -qx - qy
    F[:-1, 1:] += -qx + qy
    return F


def normal_trace(grid: Grid, partition: BoundaryPartition, sigma: np.ndarray) -> np.ndarray:
    """
    Discrete σν at the boundary nodes, (nb, 2).

    It is the boundary traction that makes the nodal divergence vanish, so it
    equals σν exactly on edge nodes for constant σ.
    """
    F = sym_gradient_adjoint(grid, sigma)
    return grid.h ** 2 * partition.gather(F) / partition.ds[:, None]


def divergence_with_traction(
    grid: Grid,
    partition: BoundaryPartition,
    sigma: np.ndarray,
    traction: np.ndarray,
) -> np.ndarray:
    """
    Nodal divergence of σ with boundary traction T (one row per boundary node).

    Raises:
        DimensionError: if the traction does not cover every boundary node
    """
    traction = np.asarray(traction, dtype=float)
    if traction.shape != (partition.size, 2):
        raise DimensionError("Traction must be given at every boundary node",
                             expected=(partition.size, 2), actual=traction.shape)
    F = sym_gradient_adjoint(grid, sigma)
    force = -grid.h ** 2 * F + partition.scatter(traction * partition.ds[:, None])
    return force / grid.nodal_weights()[..., None]


def green_identity_residual(
    grid: Grid,
    partition: BoundaryPartition,
    sigma: np.ndarray,
    traction: np.ndarray,
    u: np.ndarray,
) -> float:
    """Σ σ:Eu h² + Σ m div·u − Σ T·u ds."""
    h2 = grid.h ** 2
    div = divergence_with_traction(grid, partition, sigma, traction)
    interior = float(np.sum(frob_dot(sigma, sym_gradient(grid, u)))) * h2
    nodal = float(np.sum(grid.nodal_weights()[..., None] * div * u))
    boundary = float(np.sum(np.sum(traction * partition.gather(u), axis=-1) * partition.ds))
    return interior + nodal - boundary


def boundary_quadrature(
    grid: Grid,
    partition: BoundaryPartition,
    f: np.ndarray,
    restrict: str = "all",
) -> float:
    """
    Trapezoid quadrature of boundary-node values over ∂Ω, Γ_D or Γ_N.

    A face counts towards Γ_D or Γ_N when it carries that label, so run
    endpoints at Σ nodes take half weight.
    """
    key = {"all": "all", "D": LABEL_D, "N": LABEL_N}.get(restrict)
    if key is None:
        raise ConfigurationError(f"Unknown quadrature restriction {restrict!r}", key="restrict")
    f = np.asarray(f, dtype=float)
    if f.shape[0] != partition.size:
        raise DimensionError("Boundary values must be given per boundary node",
                             expected=partition.size, actual=f.shape[0])
    return float(np.sum(partition.face_weights[key] * f))


def sparse_sym_gradient(grid: Grid) -> sparse.csr_matrix:
    """
    E as a sparse matrix from flattened nodal vectors to Mandel cell vectors.

    Node dof (i, j, a) sits at (i·(ny+1) + j)·2 + a; cell component
    (i, j, c) at (i·ny + j)·3 + c with c ordering (e11, e22, √2 e12).
    """
    nx, ny, h = grid.nx, grid.ny, grid.h
    r2 = np.sqrt(2.0)
    rows, cols, vals = [], [], []
    ci, cj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    ci, cj = ci.ravel(), cj.ravel()
    cell = ci * ny + cj
    # (node offset, ∂x weight, ∂y weight) for the four corners
    corners = ((0, 0, -1.0, -1.0), (1, 0, 1.0, -1.0), (0, 1, -1.0, 1.0), (1, 1, 1.0, 1.0))
    for di, dj, wx, wy in corners:
        node = (ci + di) * (ny + 1) + (cj + dj)
        cx, cy = wx / (2.0 * h), wy / (2.0 * h)
        # e11 = ∂x u0
        rows.append(3 * cell)
        cols.append(2 * node)
        vals.append(np.full(cell.size, cx))
        # e22 = ∂y u1
        rows.append(3 * cell + 1)
        cols.append(2 * node + 1)
        vals.append(np.full(cell.size, cy))
        # √2 e12 = (∂y u0 + ∂x u1)/√2
        rows.append(3 * cell + 2)
        cols.append(2 * node)
        vals.append(np.full(cell.size, cy / r2))
        rows.append(3 * cell + 2)
        cols.append(2 * node + 1)
        vals.append(np.full(cell.size, cx / r2))
    G = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(3 * nx * ny, 2 * (nx + 1) * (ny + 1)),
    )
    return G.tocsr()
