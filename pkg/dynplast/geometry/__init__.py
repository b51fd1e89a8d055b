"""
Convex geometry - elasticity sets, boundary projections and envelopes.
"""

from dynplast.geometry.sets import (
    ElasticitySet,
    Ball,
    DeviatoricCylinder,
    HalfspaceIntersection,
    halfspaces_from_lists,
    project_K,
    support_H,
)
from dynplast.geometry.boundary import (
    BoundaryWeight,
    Membership,
    classify_minus_Knu,
    minus_Knu_membership,
    min_norm_lift,
    project_minus_Knu,
    psi_eval,
    psi_eval_direct,
    psi_grad,
    boundary_dissipation_density,
    implicit_boundary_traction,
)
from dynplast.geometry.envelope import moreau_yosida_H

__all__ = [
    # Sets
    "ElasticitySet",
    "Ball",
    "DeviatoricCylinder",
    "HalfspaceIntersection",
    "halfspaces_from_lists",
    "project_K",
    "support_H",
    # Boundary
    "BoundaryWeight",
    "Membership",
    "classify_minus_Knu",
    "minus_Knu_membership",
    "min_norm_lift",
    "project_minus_Knu",
    "psi_eval",
    "psi_eval_direct",
    "psi_grad",
    "boundary_dissipation_density",
    "implicit_boundary_traction",
    # Envelope
    "moreau_yosida_H",
]
