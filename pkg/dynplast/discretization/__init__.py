"""
Discretization - grid, boundary partition and the adjoint operator pair.
"""

from dynplast.discretization.grid import (
    Grid,
    BoundaryPartition,
    LABEL_D,
    LABEL_N,
    LABEL_SIGMA,
    EDGES,
    boundary_node_indices,
    validate_intervals,
)
from dynplast.discretization.operators import (
    sym_gradient,
    sym_gradient_adjoint,
    normal_trace,
    divergence_with_traction,
    green_identity_residual,
    boundary_quadrature,
    sparse_sym_gradient,
)

__all__ = [
    # Grid
    "Grid",
    "BoundaryPartition",
    "LABEL_D",
    "LABEL_N",
    "LABEL_SIGMA",
    "EDGES",
    "boundary_node_indices",
    "validate_intervals",
    # Operators
    "sym_gradient",
    "sym_gradient_adjoint",
    "normal_trace",
    "divergence_with_traction",
    "green_identity_residual",
    "boundary_quadrature",
    "sparse_sym_gradient",
]
