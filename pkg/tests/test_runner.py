"""End-to-end runs, artifacts and reloading."""

import numpy as np
import pytest

from conftest import ELASTIC_BASE, make_config
from dynplast.common.exceptions import CFLViolationError, ConfigHashMismatchError, SnapshotIntegrityError
from dynplast.config.scenarios import standing_wave_displacement
from dynplast.dynamics.runner import build_model, load_run, resolve_time, run
from dynplast.dynamics.storage import LEDGER_FILE, MANIFEST_FILE, SNAPSHOT_FILE, read_manifest, write_manifest


def _fixed_step_config(**overrides):
    return make_config(ELASTIC_BASE, time={"T": 0.2, "dt": 0.025}, **overrides)


class TestResolveTime:

    def test_explicit_dt(self):
        config = _fixed_step_config()
        assert resolve_time(config, build_model(config)) == (0.025, 8)

    def test_courant_dt_divides_final_time(self, elastic_config):
        dt, n = resolve_time(elastic_config, build_model(elastic_config))
        assert dt * n == pytest.approx(elastic_config.time.T)
        assert dt <= 0.5 * 0.125 / np.sqrt(3.0)

    def test_explicit_dt_over_bound(self):
        config = make_config(ELASTIC_BASE, time={"dt": 0.05})
        with pytest.raises(CFLViolationError):
            resolve_time(config, build_model(config))


class TestRun:

    def test_zero_final_time_echoes_initial_state(self):
        config = make_config(ELASTIC_BASE, time={"T": 0.0})
        result = run(config)
        assert result.n_steps == 0
        np.testing.assert_array_equal(result.final_state.v, result.trajectory.initial.v)
        assert len(result.ledger) == 1

    def test_artifacts_with_stride(self, tmp_path):
        result = run(_fixed_step_config(), out_dir=tmp_path, snapshot_stride=2)
        assert result.n_steps == 8
        loaded = load_run(tmp_path)
        assert loaded.steps == [0, 2, 4, 6, 8]
        assert list(loaded.ledger.index) == [2, 4, 6, 8]
        assert not loaded.complete
        np.testing.assert_allclose(loaded.ledger["residual"].to_numpy(),
                                   result.ledger.loc[[2, 4, 6, 8], "residual"].to_numpy(), rtol=0, atol=0)

    def test_final_step_always_saved(self, tmp_path):
        run(_fixed_step_config(), out_dir=tmp_path, snapshot_stride=3)
        assert load_run(tmp_path).steps == [0, 3, 6, 8]

    def test_reruns_are_byte_identical(self, tmp_path):
        config = _fixed_step_config()
        run(config, out_dir=tmp_path / "a")
        run(config, out_dir=tmp_path / "b")
        for name in (SNAPSHOT_FILE, LEDGER_FILE, MANIFEST_FILE):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_manifest_contents(self, tmp_path):
        result = run(_fixed_step_config(), out_dir=tmp_path)
        manifest = read_manifest(tmp_path / MANIFEST_FILE)
        assert manifest["config_hash"] == result.config_hash
        assert manifest["n_steps"] == 8
        assert set(manifest["artifacts"]) == {SNAPSHOT_FILE, LEDGER_FILE}
        assert {"numpy", "scipy", "pandas", "dynplast"} <= set(manifest["versions"])
        assert manifest["initial_data"] is None

    def test_load_run_restores_trajectory(self, tmp_path):
        result = run(_fixed_step_config(), out_dir=tmp_path)
        loaded = load_run(tmp_path)
        assert loaded.complete
        assert loaded.trajectory.n_steps == result.n_steps
        np.testing.assert_array_equal(loaded.trajectory.final_state.u, result.final_state.u)
        np.testing.assert_array_equal(loaded.trajectory.records[3].dp, result.trajectory.records[3].dp)

    def test_truncated_snapshot_detected(self, tmp_path):
        run(_fixed_step_config(), out_dir=tmp_path)
        path = tmp_path / SNAPSHOT_FILE
        path.write_bytes(path.read_bytes()[:-16])
        with pytest.raises(SnapshotIntegrityError):
            load_run(tmp_path)

    def test_tampered_manifest_hash(self, tmp_path):
        run(_fixed_step_config(), out_dir=tmp_path)
        manifest = read_manifest(tmp_path / MANIFEST_FILE)
        manifest["config_hash"] = "0" * 64
        write_manifest(tmp_path / MANIFEST_FILE, manifest)
        with pytest.raises(ConfigHashMismatchError):
            load_run(tmp_path)

    def test_standing_wave_tracks_exact_solution(self):
        # with lambda = 0 the cos mode is an exact traction-free solution
        config = make_config(ELASTIC_BASE, grid={"nx": 32, "ny": 32}, hooke={"lambda": 0.0, "mu": 1.0},
                             time={"T": 0.3, "cfl": 0.5})
        result = run(config, keep_records=False)
        model = result.trajectory.model
        exact = standing_wave_displacement(config, model.grid, result.final_state.t)
        error = np.max(np.abs(result.final_state.u - exact))
        assert error <= 0.05 * np.max(np.abs(exact))

    @staticmethod
    def _standing_wave_error(n):
        config = make_config(ELASTIC_BASE, grid={"nx": n, "ny": n}, hooke={"lambda": 0.0, "mu": 1.0},
                             time={"T": 1.0, "cfl": 0.5})
        result = run(config, keep_records=False)
        grid = result.trajectory.model.grid
        exact = standing_wave_displacement(config, grid, result.final_state.t)
        m = grid.nodal_weights()[..., None]
        return float(np.sqrt(np.sum(m * (result.final_state.u - exact) ** 2) / np.sum(m * exact ** 2)))

    def test_standing_wave_l2_error_and_order(self):
        coarse, fine = self._standing_wave_error(16), self._standing_wave_error(32)
        assert fine <= 0.02
        assert np.log2(coarse / fine) >= 1.0
