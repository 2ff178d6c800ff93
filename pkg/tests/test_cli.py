"""Tests for the command-line scenario runner."""

import json

import pytest

from src.cli import build_parser, configure_threads, main
from src.core.errors import ConfigError

SMALL_FOCK = ["--set", "fock.modes=2", "--set", "fock.n=3", "--set", "fock.samples=4"]


class TestParser:
    def test_overrides_accumulate(self):
        args = build_parser().parse_args(["gp", "--set", "gp.dt=0.01", "--set", "seed=2"])
        assert args.scenario == "gp"
        assert args.overrides == ["gp.dt=0.01", "seed=2"]

    def test_unknown_scenario_exits(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["tunnelling"])


class TestThreads:
    def test_sets_thread_caps(self, monkeypatch):
        for name in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            monkeypatch.delenv(name, raising=False)
        configure_threads(2)
        import os

        assert os.environ["OMP_NUM_THREADS"] == "2"
        assert os.environ["MKL_NUM_THREADS"] == "2"

    def test_none_leaves_environment(self, monkeypatch):
        monkeypatch.delenv("OMP_NUM_THREADS", raising=False)
        configure_threads(None)
        import os

        assert "OMP_NUM_THREADS" not in os.environ

    def test_rejects_zero(self):
        with pytest.raises(ConfigError) as exc_info:
            configure_threads(0)
        assert exc_info.value.key == "threads"


class TestMain:
    def test_missing_scenario_is_config_error(self, capsys):
        assert main([]) == 2
        assert "scenario" in capsys.readouterr().err

    def test_zero_threads_is_config_error(self, tmp_path):
        assert main(["fock-check", "--threads", "0", "--output", str(tmp_path)]) == 2

    def test_bad_override(self, tmp_path):
        assert main(["fock-check", "--set", "fock.modes", "--output", str(tmp_path)]) == 2

    def test_small_fock_run_writes_manifest(self, tmp_path, capsys):
        assert main(["fock-check", "--seed", "3", "--output", str(tmp_path), *SMALL_FOCK]) == 0
        manifest_path = tmp_path / "manifest.json"
        assert capsys.readouterr().out.strip() == str(manifest_path)
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        assert manifest["scenario"] == "fock-check"
        assert manifest["seed"] == 3
        assert manifest["error"] is None
        assert all(check["passed"] for check in manifest["checks"])
        assert (tmp_path / "checks.csv").exists()
