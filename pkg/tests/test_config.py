"""Configuration schema, hashing, settings and scenario builders."""

import json

import numpy as np
import pytest

from conftest import ALL_N, ELASTIC_BASE, PLASTIC_BASE, make_config, make_config_dict, write_config
from dynplast.common.exceptions import ConfigurationError
from dynplast.config.scenarios import (
    build_body_force,
    build_elasticity_set,
    build_grid,
    build_initial_fields,
    standing_wave_frequency,
)
from dynplast.config.schemas import config_hash, config_schema, config_to_dict, load_config, parse_config
from dynplast.config.settings import DEFAULT_OUTPUT_DIR, get_settings
from dynplast.geometry.sets import Ball, DeviatoricCylinder, HalfspaceIntersection


class TestParseConfig:

    def test_defaults(self, elastic_config):
        assert elastic_config.time.snapshot_stride == 1
        assert elastic_config.time.dt is None
        assert elastic_config.body_force.kind == "none"
        assert elastic_config.bc_mode.kind == "limit"
        assert elastic_config.bc_mode.lambda_ref is None

    @pytest.mark.parametrize("section, payload, key", [
        ("hooke", {"lambda": 1.0}, "hooke.mu"),
        ("hooke", {"mu": 1.0}, "hooke.lambda"),
        ("elasticity_set", {"kind": "ball"}, "elasticity_set.radius"),
        ("bc_mode", {"kind": "dissipative"}, "bc_mode.lambda"),
        ("grid", {"Lx": 1.0, "Ly": 1.0, "nx": 8, "ny": 8, "nz": 2}, "grid.nz"),
    ])
    def test_error_names_dotted_key(self, section, payload, key):
        data = make_config_dict(ELASTIC_BASE)
        data[section] = payload
        with pytest.raises(ConfigurationError) as exc:
            parse_config(data)
        assert exc.value.key == key
        assert key in str(exc.value)

    def test_missing_section(self):
        data = make_config_dict(ELASTIC_BASE)
        del data["time"]
        with pytest.raises(ConfigurationError) as exc:
            parse_config(data)
        assert exc.value.key == "time"

    @pytest.mark.parametrize("overrides", [
        {"grid": {"nx": 8, "ny": 4}},
        {"hooke": {"lambda": -1.0, "mu": 1.0}},
        {"bc_mode": {"kind": "dissipative", "lambda": -5.0}},
        {"time": {"cfl": 1.5}},
        {"time": {"snapshot_stride": 0}},
        {"elasticity_set": {"kind": "ball", "radius": 0.1}},
        {"elasticity_set": {"kind": "halfspaces", "normals": [[[1.0, 0.0], [0.0, 0.0]]], "offsets": [1.0, 2.0]}},
    ])
    def test_rejects_invalid_values(self, overrides):
        with pytest.raises(ConfigurationError):
            make_config(ELASTIC_BASE, **overrides)

    @pytest.mark.parametrize("intervals", [
        [{"start": 0.0, "end": 0.4, "label": "D"}, {"start": 0.5, "end": 1.0, "label": "N"}],
        [{"start": 0.0, "end": 0.6, "label": "D"}, {"start": 0.5, "end": 1.0, "label": "N"}],
        [{"start": 0.0, "end": 1.0, "label": "Sigma"}],
        [],
    ])
    def test_rejects_bad_partition(self, intervals):
        partition = dict(ALL_N, bottom=intervals)
        with pytest.raises(ConfigurationError) as exc:
            make_config(ELASTIC_BASE, partition=partition)
        assert exc.value.key.startswith("partition.bottom")


class TestHashing:

    def test_stable_and_sensitive(self):
        a = make_config(ELASTIC_BASE)
        b = make_config(ELASTIC_BASE)
        c = make_config(ELASTIC_BASE, time={"T": 0.3})
        assert config_hash(a) == config_hash(b)
        assert config_hash(a) != config_hash(c)
        assert len(config_hash(a)) == 64

    def test_output_dir_excluded(self):
        a = make_config(ELASTIC_BASE)
        b = make_config(ELASTIC_BASE, output_dir="/tmp/elsewhere")
        assert config_hash(a) == config_hash(b)

    def test_round_trip_through_dict(self, plastic_config):
        again = parse_config(config_to_dict(plastic_config))
        assert again == plastic_config
        assert config_to_dict(plastic_config)["hooke"]["lambda"] == 1.0


class TestLoadConfig:

    def test_load(self, tmp_path):
        config = load_config(write_config(tmp_path / "c.json", PLASTIC_BASE))
        assert config.elasticity_set.kind == "deviatoric_cylinder"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_config(path)

    def test_non_object_root(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps([1, 2]), encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_config(path)

    def test_schema(self):
        schema = config_schema()
        assert {"grid", "hooke", "elasticity_set", "partition", "bc_mode", "time"} <= set(schema["required"])


class TestSettings:

    def test_defaults(self, monkeypatch):
        for name in ("DYNPLAST_OUTPUT_DIR", "DYNPLAST_LOG_LEVEL", "DYNPLAST_WORKERS"):
            monkeypatch.delenv(name, raising=False)
        settings = get_settings()
        assert str(settings.output_dir) == DEFAULT_OUTPUT_DIR
        assert settings.log_level == "INFO"
        assert settings.workers == 1

    def test_environment(self, monkeypatch, tmp_path):
        monkeypatch.setenv("DYNPLAST_OUTPUT_DIR", str(tmp_path))
        monkeypatch.setenv("DYNPLAST_LOG_LEVEL", "debug")
        monkeypatch.setenv("DYNPLAST_WORKERS", "3")
        settings = get_settings()
        assert settings.output_dir == tmp_path
        assert settings.log_level == "DEBUG"
        assert settings.workers == 3

    @pytest.mark.parametrize("raw", ["many", "0"])
    def test_invalid_workers(self, monkeypatch, raw):
        monkeypatch.setenv("DYNPLAST_WORKERS", raw)
        with pytest.raises(ConfigurationError) as exc:
            get_settings()
        assert exc.value.key == "DYNPLAST_WORKERS"


class TestScenarios:

    def test_elasticity_sets(self):
        assert isinstance(build_elasticity_set(make_config(ELASTIC_BASE)), Ball)
        assert isinstance(build_elasticity_set(make_config(PLASTIC_BASE)), DeviatoricCylinder)
        box = make_config(ELASTIC_BASE, elasticity_set={
            "kind": "halfspaces",
            "normals": [[[1.0, 0.0], [0.0, 0.0]], [[-1.0, 0.0], [0.0, 0.0]]],
            "offsets": [1.0, 1.0],
        })
        assert isinstance(build_elasticity_set(box), HalfspaceIntersection)

    def test_standing_wave_fields(self, elastic_config):
        grid = build_grid(elastic_config)
        fields = build_initial_fields(elastic_config, grid)
        np.testing.assert_allclose(fields.v0[0, :, 0], 0.01)
        np.testing.assert_allclose(fields.v0[-1, :, 0], -0.01)
        assert not np.any(fields.v0[..., 1])
        assert not np.any(fields.e0) and not np.any(fields.u0)

    def test_sin_mode_vanishes_on_x_faces(self):
        config = make_config(ELASTIC_BASE, initial_data={"mode": "sin"})
        fields = build_initial_fields(config, build_grid(config))
        assert not np.any(fields.v0[0]) and not np.any(fields.v0[-1])

    def test_plastic_loading_direction(self, plastic_config):
        fields = build_initial_fields(plastic_config, build_grid(plastic_config))
        assert not np.any(fields.v0[..., 0])
        assert fields.v0[4, 0, 1] == pytest.approx(0.2)
        assert fields.r_margin == 0.05

    def test_vanish_on_boundary(self, plastic_config):
        config = make_config(PLASTIC_BASE, initial_data={"vanish_on_boundary": True})
        fields = build_initial_fields(config, build_grid(config))
        assert not np.any(fields.v0[:, 0]) and not np.any(fields.v0[:, -1])

    def test_body_force_pulse(self):
        config = make_config(ELASTIC_BASE, body_force={"kind": "pulse", "amplitude": 2.0, "duration": 0.1})
        force = build_body_force(config, build_grid(config))
        assert not np.any(force(0.0))
        assert not np.any(force(0.2))
        peak = force(0.05)
        assert peak[4, 4, 0] == pytest.approx(2.0)
        assert not np.any(peak[..., 1])
        assert build_body_force(make_config(ELASTIC_BASE), build_grid(make_config(ELASTIC_BASE))) is None

    def test_standing_wave_frequency(self, elastic_config):
        assert standing_wave_frequency(elastic_config) == pytest.approx(np.pi * np.sqrt(3.0))
        shear_only = make_config(ELASTIC_BASE, grid={"Lx": 2.0, "Ly": 2.0}, hooke={"lambda": 0.0, "mu": 2.0})
        assert standing_wave_frequency(shear_only) == pytest.approx(np.pi)
