"""Tests for config parsing and the result files."""

import csv
import json

import pytest

from src.core.errors import ConfigError
from src.core.io import (
    build_config,
    failed_checks,
    load_config,
    parse_config_text,
    parse_override,
    write_manifest,
    write_records,
)
from src.models.results import RunManifest
from src.models.schemas import Scenario
from tests.conftest import make_check, make_record


class TestParseConfigText:
    def test_comments_and_blank_lines(self):
        text = "# depletion run\nscenario = depletion\n\ndepletion.n_values = 2,4  # doubled\n"
        assert parse_config_text(text) == {"scenario": "depletion", "depletion.n_values": "2,4"}

    def test_missing_equals_names_line(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_config_text("scenario = gp\nfock.modes 3\n")
        assert exc_info.value.key == "line 2"

    def test_duplicate_key(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_config_text("seed = 1\nseed = 2\n")
        assert exc_info.value.key == "seed"


class TestBuildConfig:
    def test_defaults_fill_blocks(self):
        config = build_config({"scenario": "fock-check", "fock.modes": "2"})
        assert config.scenario == Scenario.FOCK_CHECK
        assert config.fock.modes == 2
        assert config.seed == 0

    def test_scenario_required(self):
        with pytest.raises(ConfigError) as exc_info:
            build_config({"seed": "1"})
        assert exc_info.value.key == "scenario"

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError) as exc_info:
            build_config({"scenario": "scatter", "scatter.bogus": "1"})
        assert exc_info.value.key == "scatter.bogus"

    def test_bad_value_named(self):
        with pytest.raises(ConfigError) as exc_info:
            build_config({"scenario": "fock-check", "fock.modes": "zero"})
        assert exc_info.value.key == "fock.modes"

    def test_too_deep_key(self):
        with pytest.raises(ConfigError):
            build_config({"scenario": "gp", "gp.grid.points": "64"})

    def test_overrides_win(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("scenario = gp\nseed = 1\n", encoding="utf-8")
        config = load_config(path, {"seed": "5"})
        assert config.scenario == Scenario.GP
        assert config.seed == 5

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigError) as exc_info:
            load_config(tmp_path / "missing.cfg")
        assert exc_info.value.key == "config"


class TestParseOverride:
    def test_splits_on_first_equals(self):
        assert parse_override("potential.table = a=b.csv") == ("potential.table", "a=b.csv")

    def test_needs_equals(self):
        with pytest.raises(ConfigError):
            parse_override("fock.modes")


class TestWriteRecords:
    def test_series_written_with_full_precision(self, tmp_path):
        written = write_records([make_record()], tmp_path)
        assert [p.name for p in written] == ["sweep.csv", "checks.csv", "scalars.csv"]
        with (tmp_path / "sweep.csv").open(encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["n", "value"]
        assert rows[1] == ["1.0000000000000000e+00", "5.0000000000000000e-01"]

    def test_records_without_series_only_reach_tables(self, tmp_path):
        record = make_record(name="fock-check", series={})
        record.checks.append(make_check())
        written = write_records([record], tmp_path)
        assert [p.name for p in written] == ["checks.csv", "scalars.csv"]
        with (tmp_path / "checks.csv").open(encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[1][:3] == ["fock-check", make_check().name, "true"]

    def test_repeated_names_get_suffixes(self, tmp_path):
        written = write_records([make_record(), make_record()], tmp_path)
        assert [p.name for p in written[:2]] == ["sweep.csv", "sweep-2.csv"]


class TestManifest:
    def test_infinite_threshold_written_as_null(self, tmp_path):
        manifest = RunManifest(scenario="depletion", config={}, version="0", seed=0, started="now")
        manifest.checks.append(make_check(threshold=float("inf")))
        path = write_manifest(manifest, tmp_path)
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert payload["checks"][0]["threshold"] is None
        assert payload["scenario"] == "depletion"
        assert list(tmp_path.iterdir()) == [path]

    def test_failed_checks(self):
        checks = [make_check(), make_check(name="bad", passed=False)]
        assert [c.name for c in failed_checks(checks)] == ["bad"]
