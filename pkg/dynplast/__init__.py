"""
dynplast - dynamic perfect plasticity with dissipative boundary conditions.

Simulator and verification lab: relaxed dissipative boundary model for finite
λ, its mixed Dirichlet/Neumann limit, energy ledgers, duality-pairing checks
and λ-sweeps.
"""

__version__ = "0.1.0"
