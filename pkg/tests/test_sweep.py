"""λ-sweeps and the Moreau lower bound."""

import dataclasses
import json

import pytest

from conftest import CLAMPED_SIDES, ELASTIC_BASE, PLASTIC_BASE, make_config
from dynplast.analysis.sweep import (
    SWEEP_REPORT_FILE,
    SWEEP_SUMMARY_FILE,
    SWEEP_TABLE_FILE,
    lambda_sweep,
    member_config,
    moreau_lower_bound_check,
)
from dynplast.common.exceptions import ConfigurationError, SweepError
from dynplast.dynamics.runner import run

SWEEP_LAMBDAS = [10.0, 100.0, 1e3, 1e4]


@pytest.fixture(scope="module")
def sweep_report(tmp_path_factory):
    base = make_config(PLASTIC_BASE, partition=CLAMPED_SIDES,
                       bc_mode={"kind": "dissipative", "lambda": 100.0})
    out = tmp_path_factory.mktemp("sweep")
    return lambda_sweep(base, SWEEP_LAMBDAS, out_dir=out), out


class TestValidation:

    @pytest.mark.parametrize("lambdas", [[10.0], [100.0, 10.0], [10.0, 10.0], [0.0, 1.0]])
    def test_rejects(self, mixed_plastic_config, lambdas):
        with pytest.raises(SweepError):
            lambda_sweep(mixed_plastic_config, lambdas)

    def test_member_config(self, mixed_plastic_config):
        member = member_config(mixed_plastic_config, 50.0)
        assert member.bc_mode.kind == "dissipative"
        assert member.bc_mode.lam == 50.0
        assert member.grid == mixed_plastic_config.grid
        assert member_config(mixed_plastic_config, None).bc_mode.kind == "limit"

    def test_failing_member_is_wrapped(self, mixed_plastic_config):
        # the stress correction leaves K for small λ
        with pytest.raises(SweepError) as exc:
            lambda_sweep(mixed_plastic_config, [1e-3, 1.0], include_limit=False)
        assert exc.value.lam == pytest.approx(1e-3)


class TestSweep:

    def test_neumann_flux_decay(self, sweep_report):
        report, _ = sweep_report
        assert -2.1 < report.neumann_slope < -1.9
        assert report.flags["neumann_flux_nonincreasing"]
        assert len(report.successive_differences) == 3
        assert report.flags["differences_decreasing"]
        assert report.flags["limit_within_cauchy_tail"]
        assert report.limit_difference <= report.successive_differences[-1]
        assert report.limit is not None
        assert report.limit_difference >= 0.0

    def test_artifacts(self, sweep_report):
        report, out = sweep_report
        for name in (SWEEP_REPORT_FILE, SWEEP_TABLE_FILE, SWEEP_SUMMARY_FILE):
            assert (out / name).exists()
        data = json.loads((out / SWEEP_REPORT_FILE).read_text(encoding="utf-8"))
        assert data["lambdas"] == SWEEP_LAMBDAS
        assert "u_final" not in data["members"][0]
        assert (out / "lambda_10" / "manifest.json").exists()
        assert (out / "lambda_10000" / "manifest.json").exists()
        assert (out / "limit" / "manifest.json").exists()
        assert "LAMBDA SWEEP REPORT" in report.summary()
        assert list(report.to_frame().index) == SWEEP_LAMBDAS

    def test_worker_pool_gives_identical_members(self, mixed_plastic_config):
        serial = lambda_sweep(mixed_plastic_config, [10.0, 100.0], include_limit=False)
        pooled = lambda_sweep(mixed_plastic_config, [10.0, 100.0], workers=2, include_limit=False)
        assert [m["final_digest"] for m in serial.members] == [m["final_digest"] for m in pooled.members]
        assert pooled.limit is None


class TestMoreau:

    def test_limit_dissipation_is_a_lower_bound(self, mixed_plastic_config):
        relaxed = run(member_config(mixed_plastic_config, 1e4), keep_records=False)
        limit = run(member_config(mixed_plastic_config, None), keep_records=False)
        check = moreau_lower_bound_check(relaxed, limit)
        assert check.check_name == "moreau_lower_bound"
        assert check.subject == "lambda=10000"
        assert set(check.details) == {"limit_total", "relaxed_total", "gap", "tol"}
        assert check.passed
        assert check.details["limit_total"] > 0.0

    def test_deficient_relaxed_dissipation_fails(self, mixed_plastic_config):
        relaxed = run(member_config(mixed_plastic_config, 1e4), keep_records=False)
        limit = run(member_config(mixed_plastic_config, None), keep_records=False)
        starved = dataclasses.replace(relaxed, ledger=relaxed.ledger * 0.5)
        check = moreau_lower_bound_check(starved, limit)
        assert not check.passed
        assert check.details["gap"] < 0.0

    def test_mismatched_runs(self, mixed_plastic_config):
        relaxed = run(mixed_plastic_config, keep_records=False)
        other = run(make_config(ELASTIC_BASE), keep_records=False)
        with pytest.raises(ConfigurationError):
            moreau_lower_bound_check(relaxed, other)

    def test_mode_order(self, mixed_plastic_config):
        relaxed = run(mixed_plastic_config, keep_records=False)
        limit = run(member_config(mixed_plastic_config, None), keep_records=False)
        with pytest.raises(ConfigurationError):
            moreau_lower_bound_check(limit, relaxed)
