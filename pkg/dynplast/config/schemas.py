"""Pydantic schemas for simulation configuration files."""

import hashlib
import json
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from dynplast.common.exceptions import ConfigurationError


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# GEOMETRY AND MATERIAL

class GridConfig(_Strict):
    """Rectangle [0, Lx] × [0, Ly] split into nx × ny square cells."""
    Lx: float = Field(1.0, gt=0)
    Ly: float = Field(1.0, gt=0)
    nx: int = Field(..., ge=1, le=4096)
    ny: int = Field(..., ge=1, le=4096)

    @model_validator(mode="after")
    def _square_cells(self):
        hx, hy = self.Lx / self.nx, self.Ly / self.ny
        if abs(hx - hy) > 1e-12 * max(hx, hy):
            raise ValueError(f"cells must be square (Lx/nx={hx}, Ly/ny={hy})")
        return self


class HookeConfig(_Strict):
    """Lamé coefficients; ellipticity requires µ > 0 and 2λ + 2µ > 0."""
    lame_lambda: float = Field(..., alias="lambda")
    mu: float = Field(..., gt=0)

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    @model_validator(mode="after")
    def _elliptic(self):
        if not 2.0 * self.lame_lambda + 2.0 * self.mu > 0:
            raise ValueError("ellipticity requires 2·lambda + 2·mu > 0")
        return self


class BallSetConfig(_Strict):
    kind: Literal["ball"] = "ball"
    radius: float = Field(..., gt=0)


class CylinderSetConfig(_Strict):
    kind: Literal["deviatoric_cylinder"] = "deviatoric_cylinder"
    radius: float = Field(..., gt=0)


class HalfspaceSetConfig(_Strict):
    kind: Literal["halfspaces"] = "halfspaces"
    normals: List[List[List[float]]] = Field(..., min_length=1)
    offsets: List[float] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _matching(self):
        if len(self.normals) != len(self.offsets):
            raise ValueError("one offset per normal is required")
        if any(c <= 0 for c in self.offsets):
            raise ValueError("offsets must be positive")
        return self


ElasticitySetConfig = Annotated[
    Union[BallSetConfig, CylinderSetConfig, HalfspaceSetConfig],
    Field(discriminator="kind"),
]


# BOUNDARY

class EdgeInterval(_Strict):
    """Labelled fraction interval [start, end] of one edge."""
    start: float = Field(..., ge=0, le=1)
    end: float = Field(..., ge=0, le=1)
    label: Literal["D", "N"]

    def as_tuple(self) -> Tuple[float, float, str]:
        return (self.start, self.end, self.label)


class PartitionConfig(_Strict):
    """Per-edge labelled intervals; each edge must be covered contiguously."""
    bottom: List[EdgeInterval]
    right: List[EdgeInterval]
    top: List[EdgeInterval]
    left: List[EdgeInterval]

    @field_validator("bottom", "right", "top", "left")
    @classmethod
    def _covers_edge(cls, intervals: List[EdgeInterval]) -> List[EdgeInterval]:
        if not intervals:
            raise ValueError("at least one interval is required")
        ordered = sorted(intervals, key=lambda iv: iv.start)
        if ordered[0].start != 0.0 or ordered[-1].end != 1.0:
            raise ValueError("intervals must cover [0, 1]")
        for prev, cur in zip(ordered[:-1], ordered[1:]):
            if abs(cur.start - prev.end) > 1e-12:
                raise ValueError(f"intervals must be contiguous without overlap (at {cur.start})")
        for iv in ordered:
            if not iv.end > iv.start:
                raise ValueError(f"empty interval [{iv.start}, {iv.end}]")
        return ordered

    def as_edges(self):
        return {edge: [iv.as_tuple() for iv in getattr(self, edge)]
                for edge in ("bottom", "right", "top", "left")}


class DissipativeModeConfig(_Strict):
    kind: Literal["dissipative"] = "dissipative"
    lam: float = Field(..., gt=0, alias="lambda")

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class LimitModeConfig(_Strict):
    """
    λ → ∞ boundary mode.

    lambda_ref = None (the default) applies the exact λ = ∞ map on Γ_D. A finite
    value such as 1e6 replaces it with the large-λ surrogate P_{−Kν}(λ_ref·v).
    """
    kind: Literal["limit"] = "limit"
    lambda_ref: Optional[float] = Field(None, gt=0)


BCModeConfig = Annotated[
    Union[DissipativeModeConfig, LimitModeConfig],
    Field(discriminator="kind"),
]


# TIME, DATA, FORCES

class TimeConfig(_Strict):
    """Final time with either a Courant factor or an explicit step."""
    T: float = Field(..., ge=0)
    cfl: float = Field(0.5, gt=0, le=1)
    dt: Optional[float] = Field(None, gt=0)
    snapshot_stride: int = Field(1, ge=1)
    blowup_factor: float = Field(1e6, gt=1)


class InitialDataConfig(_Strict):
    """
    Named analytic initial-data family.

    zero            all fields zero; pair with a body-force pulse
    standing_wave   v0 = amplitude·cos(πx/Lx)·e1 (or sin for Dirichlet x-faces), σ0 = 0
                    oscillating at ω = π·sqrt(λ+2µ)/Lx
    plastic_loading v0 = amplitude·sin(πx/Lx)·g(y)·direction with g a pulse at y = 0
    """
    family: Literal["zero", "standing_wave", "plastic_loading"] = "zero"
    amplitude: float = 0.0
    mode: Literal["cos", "sin"] = "cos"
    width: float = Field(0.15, gt=0)
    direction: Tuple[float, float] = (0.0, 1.0)
    vanish_on_boundary: bool = False
    velocity_perturbation: float = 0.0
    r_margin: float = Field(0.5, gt=0)


class BodyForceConfig(_Strict):
    """Gaussian-in-space, sin²-in-time force pulse active on [0, duration]."""
    kind: Literal["none", "pulse"] = "none"
    amplitude: float = 0.0
    center: Tuple[float, float] = (0.5, 0.5)
    width: float = Field(0.1, gt=0)
    duration: float = Field(0.25, gt=0)
    direction: Tuple[float, float] = (1.0, 0.0)


class SimConfig(_Strict):
    """Complete description of one deterministic simulation."""
    grid: GridConfig
    hooke: HookeConfig
    elasticity_set: ElasticitySetConfig
    partition: PartitionConfig
    bc_mode: BCModeConfig
    time: TimeConfig
    initial_data: InitialDataConfig = Field(default_factory=InitialDataConfig)
    body_force: BodyForceConfig = Field(default_factory=BodyForceConfig)
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def _margin_inside_set(self):
        if self.elasticity_set.kind in ("ball", "deviatoric_cylinder"):
            if self.initial_data.r_margin > self.elasticity_set.radius:
                raise ValueError("initial_data.r_margin exceeds the elasticity set radius")
        return self


# LOADING AND HASHING

def _dotted(loc) -> str:
    # drop discriminator tags that pydantic inserts into union locations
    parts = [str(p) for p in loc if p not in ("ball", "deviatoric_cylinder", "halfspaces",
                                                "dissipative", "limit")]
    return ".".join(parts)


def _config_error(exc: ValidationError) -> ConfigurationError:
    first = exc.errors()[0]
    key = _dotted(first["loc"]) or "config"
    if first["type"] == "missing":
        message = f"Missing required key '{key}'"
    else:
        message = f"Invalid value for '{key}': {first['msg']}"
    return ConfigurationError(message, key=key, details={"errors": len(exc.errors())})


def parse_config(data: dict) -> SimConfig:
    """
    Validate a configuration mapping.

    Raises:
        ConfigurationError: naming the first offending dotted key
    """
    try:
        return SimConfig.model_validate(data)
    except ValidationError as e:
        raise _config_error(e) from e


def load_config(path: Union[str, Path]) -> SimConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigurationError(f"Config file not found: {path}", key="config", original_error=e)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Config file is not valid JSON: {e}", key="config", original_error=e)
    if not isinstance(data, dict):
        raise ConfigurationError("Config root must be a JSON object", key="config")
    return parse_config(data)


def config_to_dict(config: SimConfig) -> dict:
    """Canonical JSON-compatible dump using the published key names."""
    return config.model_dump(mode="json", by_alias=True)


def canonical_json(config: SimConfig) -> str:
    # output_dir does not change the computation
    data = config_to_dict(config)
    data.pop("output_dir", None)
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_hash(config: SimConfig) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def config_schema() -> dict:
    return SimConfig.model_json_schema(by_alias=True)
