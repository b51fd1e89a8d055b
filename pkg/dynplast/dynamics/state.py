"""
State, step parameters, boundary-condition modes and trajectories.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from dynplast.common.exceptions import ConfigurationError
from dynplast.core.algebra import HookeTensor, hooke_apply
from dynplast.discretization.grid import LABEL_D, LABEL_N, BoundaryPartition, Grid
from dynplast.geometry.sets import ElasticitySet

logger = logging.getLogger(__name__)

BodyForce = Callable[[float], np.ndarray]

DISSIPATIVE = "dissipative"
LIMIT = "limit"


@dataclass
class State:
    """
    Fields at time t.

    u, v live on nodes; e, p, sigma on cells; pD is the accumulated boundary
    slip dt·v⁺ at Γ_D nodes (zero rows elsewhere), one row per boundary node.
    """
    t: float
    u: np.ndarray
    v: np.ndarray
    e: np.ndarray
    p: np.ndarray
    sigma: np.ndarray
    pD: np.ndarray

    @classmethod
    def zeros(cls, grid: Grid, partition: BoundaryPartition) -> "State":
        return cls(
            t=0.0,
            u=grid.zero_vector_field(),
            v=grid.zero_vector_field(),
            e=grid.zero_sym_field(),
            p=grid.zero_sym_field(),
            sigma=grid.zero_sym_field(),
            pD=np.zeros((partition.size, 2)),
        )

    @classmethod
    def from_fields(
        cls,
        grid: Grid,
        partition: BoundaryPartition,
        hooke: HookeTensor,
        u: np.ndarray,
        v: np.ndarray,
        e: np.ndarray,
        p: np.ndarray,
        t: float = 0.0,
    ) -> "State":
        e = grid.check_sym_field(e, "elastic strain")
        return cls(
            t=t,
            u=grid.check_vector_field(u, "displacement").copy(),
            v=grid.check_vector_field(v, "velocity").copy(),
            e=e.copy(),
            p=grid.check_sym_field(p, "plastic strain").copy(),
            sigma=hooke_apply(hooke, e),
            pD=np.zeros((partition.size, 2)),
        )

    def copy(self) -> "State":
        return State(self.t, self.u.copy(), self.v.copy(), self.e.copy(),
                     self.p.copy(), self.sigma.copy(), self.pD.copy())


@dataclass(frozen=True)
class StepParams:
    """Time step, Courant factor and blow-up guard; density is 1."""
    dt: float
    cfl: float = 0.5
    blowup_factor: float = 1e6
    velocity_scale: float = 1.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError(f"Time step must be positive, got {self.dt}", key="time.dt")
        if not 0 < self.cfl <= 1:
            raise ConfigurationError(f"Courant factor must lie in (0, 1], got {self.cfl}", key="time.cfl")


@dataclass(frozen=True)
class BCMode:
    """
    Boundary-condition mode.

    Dissipative(λ) weights Γ_D by λ and Γ_N by 1/λ. Limit applies T = 0 on Γ_N
    and the λ = ∞ map on Γ_D, or the finite surrogate λ_ref when one is given.
    """
    kind: str
    lam: Optional[float] = None
    lambda_ref: Optional[float] = None

    def __post_init__(self):
        if self.kind == DISSIPATIVE:
            if self.lam is None or not self.lam > 0:
                raise ConfigurationError(f"Dissipative mode needs λ > 0, got {self.lam}", key="bc_mode.lambda")
        elif self.kind == LIMIT:
            if self.lambda_ref is not None and not self.lambda_ref > 0:
                raise ConfigurationError(f"λ_ref must be positive, got {self.lambda_ref}", key="bc_mode.lambda_ref")
        else:
            raise ConfigurationError(f"Unknown boundary mode {self.kind!r}", key="bc_mode.kind")

    @classmethod
    def dissipative(cls, lam: float) -> "BCMode":
        return cls(DISSIPATIVE, lam=float(lam))

    @classmethod
    def limit(cls, lambda_ref: Optional[float] = None) -> "BCMode":
        """Limit mode; None selects the exact Dirichlet map, a number the large-λ surrogate."""
        return cls(LIMIT, lambda_ref=None if lambda_ref is None else float(lambda_ref))

    @property
    def is_limit(self) -> bool:
        return self.kind == LIMIT

    def weights(self, partition: BoundaryPartition) -> np.ndarray:
        """Per-boundary-node weight s; 0 marks a traction-free node, inf the exact Dirichlet limit."""
        s = np.zeros(partition.size)
        if self.kind == DISSIPATIVE:
            s[partition.labels == LABEL_D] = self.lam
            s[partition.labels == LABEL_N] = 1.0 / self.lam
        else:
            s[partition.labels == LABEL_D] = np.inf if self.lambda_ref is None else self.lambda_ref
        return s

    def describe(self) -> dict:
        if self.kind == DISSIPATIVE:
            return {"kind": DISSIPATIVE, "lambda": self.lam}
        return {"kind": LIMIT, "lambda_ref": self.lambda_ref}


@dataclass(frozen=True, eq=False)
class Model:
    """Grid, boundary partition, material and elasticity set of one simulation."""
    grid: Grid
    partition: BoundaryPartition
    hooke: HookeTensor
    K: ElasticitySet
    nodal_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "nodal_weights", self.grid.nodal_weights())

    @property
    def boundary_weights(self) -> np.ndarray:
        """Lumped nodal weights m at the boundary nodes."""
        return self.partition.gather(self.nodal_weights)


@dataclass
class StepRecord:
    """State after a step with the increments that produced it."""
    step: int
    state: State
    dt: float
    de: np.ndarray
    dp: np.ndarray
    traction: np.ndarray
    v_star: Optional[np.ndarray] = None


@dataclass
class Trajectory:
    """Initial state and per-step records of one run."""
    model: Model
    mode: BCMode
    initial: State
    config_hash: str = ""
    body_force: Optional[BodyForce] = None
    records: List[StepRecord] = field(default_factory=list)

    @property
    def n_steps(self) -> int:
        return len(self.records)

    @property
    def final_state(self) -> State:
        return self.records[-1].state if self.records else self.initial

    def states(self) -> List[State]:
        return [self.initial] + [r.state for r in self.records]
