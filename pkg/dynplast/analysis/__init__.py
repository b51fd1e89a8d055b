"""
Analysis - duality pairing, convexity and flow-rule checks, λ-sweeps and stability.
"""

from dynplast.analysis.battery import TestFunction, default_battery, REGIMES
from dynplast.analysis.duality import (
    duality_pairing,
    pairing_terms,
    direct_plastic_work,
    boundary_traction_power,
)
from dynplast.analysis.convexity import (
    ConvexityResult,
    convexity_check,
    flow_rule_residual,
    additive_decomposition_drift,
    stress_admissibility,
)
from dynplast.analysis.sweep import (
    SweepReport,
    lambda_sweep,
    member_config,
    moreau_lower_bound_check,
)
from dynplast.analysis.stability import StabilityReport, stability_check

__all__ = [
    # Test functions
    "TestFunction",
    "default_battery",
    "REGIMES",
    # Duality
    "duality_pairing",
    "pairing_terms",
    "direct_plastic_work",
    "boundary_traction_power",
    # Convexity
    "ConvexityResult",
    "convexity_check",
    "flow_rule_residual",
    "additive_decomposition_drift",
    "stress_admissibility",
    # Sweeps
    "SweepReport",
    "lambda_sweep",
    "member_config",
    "moreau_lower_bound_check",
    # Stability
    "StabilityReport",
    "stability_check",
]
