"""
Stability of the evolution under perturbed initial velocity.

Two runs from v0 and v0 + ε·b, b a bump vanishing on ∂Ω, are compared at the
final time in the energy norm ½|Δv|²_M + Q(Δe). The constant
C = sqrt(2·distance)/ε is measured at the configured step and at half of it.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from dynplast.common.exceptions import ConfigurationError
from dynplast.common.quality_checks import CheckResult, check_ratio_window
from dynplast.config.scenarios import build_initial_fields
from dynplast.config.schemas import SimConfig, config_to_dict, parse_config
from dynplast.dynamics.ledger import elastic_energy, kinetic_energy
from dynplast.dynamics.runner import build_model, run

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-6
REFINEMENT_WINDOW = (0.5, 2.0)


@dataclass
class StabilityReport:
    epsilon: float
    distances: List[float] = field(default_factory=list)
    constants: List[float] = field(default_factory=list)
    cfl: List[float] = field(default_factory=list)

    @property
    def refinement_ratio(self) -> float:
        """C at the finer step over C at the coarser one."""
        if len(self.constants) < 2 or self.constants[0] == 0.0:
            return float("nan")
        return self.constants[-1] / self.constants[0]

    def to_dict(self) -> Dict[str, object]:
        return {
            "epsilon": self.epsilon,
            "distances": self.distances,
            "constants": self.constants,
            "cfl": self.cfl,
            "refinement_ratio": self.refinement_ratio,
        }

    def to_check_result(self, window: Tuple[float, float] = REFINEMENT_WINDOW) -> CheckResult:
        """The constant must not drift with the time step."""
        if len(self.constants) < 2:
            return CheckResult(
                check_name="refinement_ratio",
                subject="stability",
                passed=True,
                message="single level, nothing to compare",
                severity="INFO",
            )
        return check_ratio_window(self.constants[-1], self.constants[0], "stability", "refinement_ratio", window)


def perturbation_field(config: SimConfig, epsilon: float) -> np.ndarray:
    """ε·sin(πx/Lx)·sin(πy/Ly)·(1, 1)/√2 on the nodes."""
    grid = build_model(config).grid
    X = grid.node_coords()
    bump = np.sin(np.pi * X[..., 0] / grid.Lx) * np.sin(np.pi * X[..., 1] / grid.Ly)
    bump[np.abs(bump) < 1e-14] = 0.0
    return epsilon * bump[..., None] * np.array([1.0, 1.0]) / np.sqrt(2.0)


def energy_distance(config: SimConfig, epsilon: float) -> float:
    model = build_model(config)
    base_v0 = build_initial_fields(config, model.grid).v0
    base = run(config, keep_records=False)
    perturbed = run(config, keep_records=False, v0_override=base_v0 + perturbation_field(config, epsilon))
    dv = perturbed.final_state.v - base.final_state.v
    de = perturbed.final_state.e - base.final_state.e
    return kinetic_energy(model, dv) + elastic_energy(model, de)


def stability_check(config: SimConfig, epsilon: float = DEFAULT_EPSILON, refine: bool = True) -> StabilityReport:
    """
    Measure the stability constant, optionally again with the Courant factor halved.

    Raises:
        ConfigurationError: if epsilon is not positive or the config fixes dt explicitly with refine
    """
    if not epsilon > 0:
        raise ConfigurationError(f"Perturbation size must be positive, got {epsilon}", key="epsilon")
    if refine and config.time.dt is not None:
        raise ConfigurationError("Refinement halves the Courant factor; leave time.dt unset", key="time.dt")

    logger.info("=" * 60)
    logger.info(f"  STABILITY CHECK: epsilon={epsilon:g}")
    logger.info("=" * 60)

    report = StabilityReport(epsilon=epsilon)
    levels = [config.time.cfl, 0.5 * config.time.cfl] if refine else [config.time.cfl]
    for cfl in levels:
        data = config_to_dict(config)
        data["time"]["cfl"] = cfl
        level = parse_config(data)
        distance = energy_distance(level, epsilon)
        constant = float(np.sqrt(2.0 * max(distance, 0.0)) / epsilon)
        report.cfl.append(cfl)
        report.distances.append(distance)
        report.constants.append(constant)
        logger.info(f"cfl={cfl:g}: energy distance {distance:.4e}, C={constant:.4g}")
    return report
