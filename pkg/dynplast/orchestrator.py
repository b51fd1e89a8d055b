"""
Command-line orchestrator.

    simulate <config>                   run one configuration and write its artifacts
    sweep <config> --lambdas a,b,c      dissipative runs at increasing λ plus the limit run
    verify <dir>                        re-audit a run directory
    make-initial <config> --lambda x    build λ-compatible initial data only
    schema                              print the configuration JSON schema

Exit codes: 0 success, 1 failed check or aborted run, 2 usage or configuration error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

# Ensure project root is in sys.path for imports when running directly
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from dynplast.analysis.convexity import (
    FLOW_RULE_TOL,
    additive_decomposition_drift,
    convexity_check,
    flow_rule_residual,
    stress_admissibility,
)
from dynplast.analysis.sweep import lambda_sweep
from dynplast.common.exceptions import ConfigurationError, DynplastError, SweepError
from dynplast.common.logging import bind_run_context, configure_logging, create_run_log_file
from dynplast.common.quality_checks import CheckReport, CheckResult, check_max_abs
from dynplast.config.scenarios import build_initial_fields
from dynplast.config.schemas import config_hash, config_schema, load_config
from dynplast.config.settings import get_settings
from dynplast.dynamics.initial import make_initial
from dynplast.dynamics.ledger import LEDGER_COLUMNS, energy_ledger
from dynplast.dynamics.runner import build_model, load_run, run

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

VERIFY_REPORT_FILE = "verify_report.json"
INITIAL_DATA_FILE = "initial_data.json"
DRIFT_TOL = 1e-10
REAUDIT_TOL = 1e-9


def _banner(title: str) -> None:
    logger.info("")
    logger.info("=" * 70)
    logger.info(f"  {title}")
    logger.info("=" * 70)


def _parse_lambdas(raw: str) -> List[float]:
    try:
        values = [float(x) for x in raw.split(",") if x.strip()]
    except ValueError as e:
        raise ConfigurationError(f"--lambdas must be a comma-separated list of numbers, got {raw!r}",
                                 key="lambdas", original_error=e)
    if len(values) < 2:
        raise ConfigurationError("--lambdas needs at least two values", key="lambdas")
    return values


def _run_dir(args: argparse.Namespace, config, digest: str) -> Path:
    if args.out:
        return Path(args.out)
    if config.output_dir:
        return Path(config.output_dir)
    return get_settings().output_dir / digest[:12]


# COMMANDS

def cmd_simulate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    digest = config_hash(config)
    out_dir = _run_dir(args, config, digest)

    _banner(f"SIMULATE: {args.config}")
    result = run(config, out_dir=out_dir, keep_records=False, snapshot_stride=args.snapshot_stride)

    print(f"Run written to {out_dir}")
    print(f"  config hash:      {digest}")
    print(f"  steps:            {result.n_steps} (dt={result.dt:.6g})")
    print(f"  max |residual|:   {result.max_abs_residual:.3e}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    lambdas = _parse_lambdas(args.lambdas)
    base = load_config(args.config)
    out_dir = _run_dir(args, base, config_hash(base))
    workers = args.workers or get_settings().workers

    _banner(f"SWEEP: {args.config}")
    report = lambda_sweep(base, lambdas, workers=workers, out_dir=out_dir,
                          include_limit=not args.no_limit)
    print(report.summary())
    print(f"Sweep written to {out_dir}")
    return EXIT_OK


def _ledger_reaudit(loaded) -> List[CheckResult]:
    stored = loaded.ledger
    results = [check_max_abs(stored["residual"], "ledger", "energy_residual",
                             tol=float("inf"), severity="INFO")]
    if not loaded.complete:
        results.append(CheckResult(
            check_name="reaudit",
            subject="ledger",
            passed=True,
            message=f"skipped: snapshot stride {loaded.manifest.get('snapshot_stride')} > 1",
            severity="INFO",
        ))
        return results

    recomputed = energy_ledger(loaded.trajectory).loc[stored.index, LEDGER_COLUMNS]
    diff = (recomputed - stored[LEDGER_COLUMNS]).abs().to_numpy()
    scale = 1.0 + float(np.nanmax(stored[LEDGER_COLUMNS].abs().to_numpy())) if len(stored) else 1.0
    result = check_max_abs(diff / scale if diff.size else [], "ledger", "reaudit", tol=REAUDIT_TOL)
    results.append(result)
    return results


def verify_run(run_dir: Path, sigma_scale: float = 1.0) -> CheckReport:
    """
    Re-audit a run directory.

    Raises:
        SnapshotIntegrityError, ConfigHashMismatchError: for damaged or foreign artifacts
    """
    loaded = load_run(run_dir)
    trajectory = loaded.trajectory
    report = CheckReport(title=f"VERIFICATION REPORT: {run_dir}")

    report.add(CheckResult(
        check_name="artifact_hashes",
        subject="artifacts",
        passed=True,
        message=f"config hash {loaded.manifest['config_hash'][:12]}, {len(loaded.steps)} stored states",
    ))
    report.extend(_ledger_reaudit(loaded))

    convexity = convexity_check(trajectory, sigma_scale=sigma_scale)
    report.extend(convexity.to_check_results())

    flow = flow_rule_residual(trajectory)
    report.add(check_max_abs(flow["residual"], "flow_rule", "residual", tol=FLOW_RULE_TOL))

    outside = stress_admissibility(trajectory)
    report.add(CheckResult(
        check_name="admissibility",
        subject="stress",
        passed=outside == 0,
        message=f"{outside} cells outside K",
        details={"outside": outside},
    ))

    drift = additive_decomposition_drift(trajectory)
    report.add(check_max_abs([drift], "strain", "additive_decomposition", tol=DRIFT_TOL))

    sigma_gap = float(loaded.ledger["sigma_gap"].iloc[-1]) if len(loaded.ledger) else 0.0
    report.add(CheckResult(
        check_name="sigma_gap",
        subject="ledger",
        passed=True,
        message=f"final Σ power gap = {sigma_gap:.3e}",
        details={"sigma_gap": sigma_gap},
        severity="INFO",
    ))
    return report


def cmd_verify(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    _banner(f"VERIFY: {run_dir}")
    report = verify_run(run_dir, sigma_scale=args.sigma_scale)

    out = Path(args.out) if args.out else run_dir / VERIFY_REPORT_FILE
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")

    print(report.summary())
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_make_initial(args: argparse.Namespace) -> int:
    if not args.lam > 0:
        raise ConfigurationError(f"--lambda must be positive, got {args.lam}", key="lambda")
    config = load_config(args.config)
    model = build_model(config)
    fields = build_initial_fields(config, model.grid)

    _banner(f"MAKE INITIAL: lambda={args.lam:g}")
    data = make_initial(model, fields.u0, fields.v0, fields.e0, fields.p0, args.lam, fields.r_margin)
    payload: Dict[str, Any] = {"config_hash": config_hash(config), **data.to_dict()}
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.out:
        out = Path(args.out)
        if out.suffix != ".json":
            out = out / INITIAL_DATA_FILE
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
        logger.info(f"Initial data summary written to {out}")
    print(text)
    return EXIT_OK


def cmd_schema(args: argparse.Namespace) -> int:
    print(json.dumps(config_schema(), sort_keys=True, indent=2))
    return EXIT_OK


# PARSER

def _bind_logging(args: argparse.Namespace) -> Optional[str]:
    """Stamp log records with the command and run; returns the log file path, if any."""
    digest = None
    if getattr(args, "config", None):
        try:
            digest = config_hash(load_config(args.config))
        except DynplastError:
            # the command handler reports the error
            pass
    run_dir = getattr(args, "run_dir", None)
    bind_run_context(args.command, config_hash=digest, run_dir=run_dir)
    if args.log_file or not args.log_dir:
        return args.log_file
    return create_run_log_file(args.log_dir, command=args.command, config_hash=digest, run_dir=run_dir)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynplast",
        description="Dynamic perfect plasticity with dissipative boundary conditions.",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--log-file", default=None, help="also write logs to this file")
    parser.add_argument("--log-dir", default=None, help="write logs to a timestamped file in this directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one configuration")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="run directory")
    p.add_argument("--snapshot-stride", type=int, default=None)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("sweep", help="λ-sweep with the limit run")
    p.add_argument("config")
    p.add_argument("--lambdas", required=True, help="comma-separated increasing values")
    p.add_argument("--out", default=None, help="sweep directory")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-limit", action="store_true", help="skip the exact limit run")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("verify", help="re-audit a run directory")
    p.add_argument("run_dir")
    p.add_argument("--out", default=None, help="report path (default: <run_dir>/verify_report.json)")
    p.add_argument("--sigma-scale", type=float, default=1.0,
                   help="scale σ inside the convexity pairing; 2 gives the negative control")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("make-initial", help="λ-compatible initial data")
    p.add_argument("config")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_make_initial)

    p = sub.add_parser("schema", help="print the configuration JSON schema")
    p.set_defaults(handler=cmd_schema)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        settings = get_settings()
    except ConfigurationError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "snapshot_stride", None) is not None and args.snapshot_stride < 1:
        print("Usage error: --snapshot-stride must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "workers", None) is not None and args.workers < 1:
        print("Usage error: --workers must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    log_file = _bind_logging(args)
    configure_logging(level=args.log_level or settings.log_level, log_file=log_file)

    try:
        return args.handler(args)
    except ConfigurationError as e:
        logger.error(f"{args.command.upper()} FAILED: {e}")
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SweepError as e:
        logger.error(f"SWEEP FAILED: {e}")
        print(f"Sweep failed: {e}", file=sys.stderr)
        return EXIT_FAILED
    except DynplastError as e:
        logger.error(f"{args.command.upper()} FAILED: {e}")
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
