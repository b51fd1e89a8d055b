"""
λ-sweep: dissipative runs at increasing λ plus the limit run.

Each member runs independently; members fan out to a process pool when
workers > 1. The report carries the Neumann flux decay fit, successive
final-time differences, the limit comparison and per-λ uniform estimates.
"""

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from dynplast.common.exceptions import ConfigurationError, DynplastError, SweepError
from dynplast.common.quality_checks import CheckResult, check_lower_bound, to_jsonable
from dynplast.config.schemas import SimConfig, config_to_dict, parse_config
from dynplast.dynamics.runner import RunResult, build_model, run

logger = logging.getLogger(__name__)

SWEEP_REPORT_FILE = "sweep_report.json"
SWEEP_TABLE_FILE = "sweep.csv"
SWEEP_SUMMARY_FILE = "sweep_summary.txt"
MOREAU_TOL = 1e-6


def member_config(base: SimConfig, lam: Optional[float]) -> SimConfig:
    """Copy of `base` in Dissipative(λ) mode, or exact Limit mode for λ = None."""
    data = config_to_dict(base)
    data["bc_mode"] = {"kind": "limit", "lambda_ref": None} if lam is None else {"kind": "dissipative", "lambda": lam}
    return parse_config(data)


def _digest(*arrays: np.ndarray) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a, dtype="<f8").tobytes())
    return h.hexdigest()


def summarize_run(result: RunResult) -> Dict[str, Any]:
    """Scalars and final fields of one member, small enough to return from a worker."""
    frame = result.ledger
    last = frame.iloc[-1]
    final = result.final_state
    return {
        "neumann_flux": float(last["neumann_flux_cum"]),
        "boundary_psi": float(last["boundary_psi_cum"]),
        "dirichlet_psi": float(last["dirichlet_psi_cum"]),
        "boundary_flux": float(last["boundary_flux_cum"]),
        "plastic": float(last["plastic_cum"]),
        "dirichlet_slip": float(last["dirichlet_slip_cum"]),
        "sup_energy": float((frame["kinetic"] + frame["elastic"]).max()),
        "total_dissipation": float(last["plastic_cum"] + last["boundary_psi_cum"] + last["boundary_flux_cum"]),
        "max_abs_residual": result.max_abs_residual,
        "sigma_gap": float(last["sigma_gap"]),
        "final_digest": _digest(final.u, final.v, final.sigma),
        "u_final": final.u,
    }


def _run_member(config_data: dict, out_dir: Optional[str]) -> Dict[str, Any]:
    config = parse_config(config_data)
    result = run(config, out_dir=out_dir, keep_records=False)
    return summarize_run(result)


def _l2(weights: np.ndarray, u: np.ndarray) -> float:
    return float(np.sqrt(np.sum(weights[..., None] * u * u)))


def _slope(lambdas: Sequence[float], values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=float)
    if len(values) < 2 or np.any(values <= 0) or not np.all(np.isfinite(values)):
        return float("nan")
    return float(np.polyfit(np.log(lambdas), np.log(values), 1)[0])


@dataclass
class SweepReport:
    """Per-λ sweep table with fitted slopes and limit comparison."""
    lambdas: List[float]
    members: List[Dict[str, Any]]
    neumann_slope: float
    successive_differences: List[float]
    limit_difference: Optional[float] = None
    limit: Optional[Dict[str, Any]] = None
    flags: Dict[str, bool] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for i, (lam, m) in enumerate(zip(self.lambdas, self.members)):
            row = {"lambda": lam}
            row.update({k: v for k, v in m.items() if k != "u_final"})
            row["successive_difference"] = (self.successive_differences[i - 1] if i > 0 else float("nan"))
            rows.append(row)
        return pd.DataFrame(rows).set_index("lambda")

    def to_dict(self) -> Dict[str, Any]:
        members = [{k: v for k, v in m.items() if k != "u_final"} for m in self.members]
        limit = {k: v for k, v in self.limit.items() if k != "u_final"} if self.limit else None
        return to_jsonable({
            "lambdas": self.lambdas,
            "members": members,
            "neumann_slope": self.neumann_slope,
            "successive_differences": self.successive_differences,
            "limit_difference": self.limit_difference,
            "limit": limit,
            "flags": self.flags,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def summary(self) -> str:
        lines = [
            "=" * 60,
            "LAMBDA SWEEP REPORT",
            "=" * 60,
            f"{'lambda':>12}  {'neumann_flux':>14}  {'dirichlet_psi':>14}  {'dissipation':>12}  {'difference':>12}",
        ]
        for i, (lam, m) in enumerate(zip(self.lambdas, self.members)):
            diff = f"{self.successive_differences[i - 1]:12.4e}" if i > 0 else f"{'-':>12}"
            lines.append(f"{lam:12.4g}  {m['neumann_flux']:14.6e}  {m['dirichlet_psi']:14.6e}  "
                         f"{m['total_dissipation']:12.4e}  {diff}")
        lines.append("-" * 60)
        lines.append(f"Neumann flux slope: {self.neumann_slope:.4f}")
        if self.limit_difference is not None:
            lines.append(f"Limit run difference: {self.limit_difference:.4e}")
        for name, value in sorted(self.flags.items()):
            lines.append(f"{name}: {value}")
        lines.append("=" * 60)
        return "\n".join(lines)

    def write(self, out_dir: Union[str, Path]) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / SWEEP_REPORT_FILE).write_text(self.to_json() + "\n", encoding="utf-8")
        self.to_frame().to_csv(out_dir / SWEEP_TABLE_FILE, float_format="%.17g", lineterminator="\n")
        (out_dir / SWEEP_SUMMARY_FILE).write_text(self.summary() + "\n", encoding="utf-8")


def _validate_lambdas(lambdas: Sequence[float]) -> List[float]:
    lambdas = [float(x) for x in lambdas]
    if len(lambdas) < 2:
        raise SweepError("A sweep needs at least two λ values", details={"lambdas": lambdas})
    for a, b in zip(lambdas[:-1], lambdas[1:]):
        if not b > a:
            raise SweepError(f"λ values must be strictly increasing ({a} then {b})", lam=b)
    if lambdas[0] <= 0:
        raise SweepError("λ values must be positive", lam=lambdas[0])
    return lambdas


def lambda_sweep(
    base: SimConfig,
    lambdas: Sequence[float],
    workers: int = 1,
    out_dir: Optional[Union[str, Path]] = None,
    include_limit: bool = True,
) -> SweepReport:
    """
    Run Dissipative(λ) for every λ and, optionally, the exact Limit run.

    Raises:
        SweepError: for fewer than two or non-increasing λ values, or a failing member
    """
    lambdas = _validate_lambdas(lambdas)
    out_dir = Path(out_dir) if out_dir is not None else None

    logger.info("=" * 60)
    logger.info(f"  LAMBDA SWEEP: {lambdas} (workers: {workers})")
    logger.info("=" * 60)

    jobs: List[Optional[float]] = list(lambdas) + ([None] if include_limit else [])

    def job_dir(lam: Optional[float]) -> Optional[str]:
        if out_dir is None:
            return None
        return str(out_dir / ("limit" if lam is None else f"lambda_{lam:g}"))

    payloads = [(config_to_dict(member_config(base, lam)), job_dir(lam)) for lam in jobs]
    results: List[Dict[str, Any]] = []
    if workers <= 1:
        for lam, (data, where) in zip(jobs, payloads):
            try:
                results.append(_run_member(data, where))
            except DynplastError as e:
                raise SweepError(f"Sweep member {'limit' if lam is None else lam} failed: {e.message}",
                                 lam=lam, original_error=e)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_member, data, where) for data, where in payloads]
            for lam, future in zip(jobs, futures):
                try:
                    results.append(future.result())
                except DynplastError as e:
                    raise SweepError(f"Sweep member {'limit' if lam is None else lam} failed: {e.message}",
                                     lam=lam, original_error=e)

    members = results[:len(lambdas)]
    limit = results[len(lambdas)] if include_limit else None

    m = build_model(base).nodal_weights

    diffs = [_l2(m, b["u_final"] - a["u_final"]) for a, b in zip(members[:-1], members[1:])]
    fluxes = [r["neumann_flux"] for r in members]
    slope = _slope(lambdas, fluxes)

    flags = {
        "neumann_flux_nonincreasing": bool(all(b <= a * (1 + 1e-12) for a, b in zip(fluxes[:-1], fluxes[1:]))),
        "differences_decreasing": bool(all(b < a for a, b in zip(diffs[:-1], diffs[1:]))),
    }
    limit_difference = None
    if limit is not None:
        limit_difference = _l2(m, limit["u_final"] - members[-1]["u_final"])
        flags["limit_within_cauchy_tail"] = bool(limit_difference <= diffs[-1]) if diffs else True

    report = SweepReport(
        lambdas=lambdas,
        members=members,
        neumann_slope=slope,
        successive_differences=diffs,
        limit_difference=limit_difference,
        limit=limit,
        flags=flags,
    )
    if out_dir is not None:
        report.write(out_dir)
    logger.info(f"Sweep complete: Neumann slope {slope:.4f}, differences {['%.3e' % d for d in diffs]}")
    return report


def moreau_lower_bound_check(
    dissipative: RunResult,
    limit: RunResult,
    tol: float = MOREAU_TOL,
) -> CheckResult:
    """
    Limit-run dissipation (interior + Γ_D slip) must not exceed the
    Dissipative-run dissipation (interior + boundary ψ) beyond tol·scale.

    Raises:
        ConfigurationError: if the runs differ in anything but the boundary mode
    """
    a, b = config_to_dict(dissipative.config), config_to_dict(limit.config)
    for key in sorted(set(a) | set(b)):
        if key in ("bc_mode", "output_dir"):
            continue
        if a.get(key) != b.get(key):
            raise ConfigurationError(f"Runs differ in '{key}'; the bound compares one setup", key=key)
    if dissipative.config.bc_mode.kind != "dissipative" or limit.config.bc_mode.kind != "limit":
        raise ConfigurationError("Expected one dissipative and one limit run", key="bc_mode")

    d_last, l_last = dissipative.ledger.iloc[-1], limit.ledger.iloc[-1]
    relaxed_total = float(d_last["plastic_cum"] + d_last["boundary_psi_cum"])
    limit_total = float(l_last["plastic_cum"] + l_last["boundary_psi_cum"])
    scale = max(1.0, abs(relaxed_total), abs(limit_total))
    gap = relaxed_total - limit_total
    result = check_lower_bound(gap, f"lambda={dissipative.config.bc_mode.lam:g}", "moreau_lower_bound", -tol * scale)
    result.message = f"limit {limit_total:.6e} <= relaxed {relaxed_total:.6e} (gap {gap:.3e})"
    result.details = {"limit_total": limit_total, "relaxed_total": relaxed_total, "gap": gap, "tol": tol}
    return result
