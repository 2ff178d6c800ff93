"""Tests for the scenario suites and their dispatch."""

import pytest

from src.core.suites import SUITES, run_suite
from src.models.schemas import Scenario
from tests.conftest import make_config


def _small_fock(**entries):
    return make_config("fock-check", fock__modes=2, fock__n=3, fock__samples=6, **entries)


def _records(scenario: str, **entries):
    return {r.name: r for r in run_suite(make_config(scenario, **entries))}


class TestDispatch:
    def test_every_scenario_has_a_suite(self):
        assert set(SUITES) == set(Scenario) - {Scenario.ALL_REGRESSIONS}


class TestDefaultScenarios:
    @pytest.mark.parametrize("scenario", sorted(s.value for s in SUITES))
    def test_default_config_passes(self, scenario):
        records = run_suite(make_config(scenario))
        failed = [f"{r.name}:{c.name}={c.residual:.3g}" for r in records for c in r.checks if not c.passed]
        assert failed == []
        assert sum(len(r.checks) for r in records) > 0


class TestFockSuite:
    def test_small_basis_passes(self):
        records = run_suite(_small_fock())
        assert [r.name for r in records] == ["fock-check"]
        checks = records[0].checks
        assert len(checks) >= 12
        assert [c.name for c in checks if not c.passed] == []
        assert records[0].metadata["dimension"] == 10

    def test_same_seed_same_residuals(self):
        first = run_suite(_small_fock(seed=7))[0].checks
        second = run_suite(_small_fock(seed=7))[0].checks
        assert [c.residual for c in first] == [c.residual for c in second]

    def test_fock_record_has_no_series(self):
        record = run_suite(_small_fock())[0]
        assert not any(record.series.values())


class TestGPSuite:
    def test_energy_drift_extrapolates_to_zero(self):
        records = _records("gp")
        for name in ("gp-evolution", "modified-gp-evolution"):
            scalars = records[name].scalars
            assert scalars["energy_drift_extrapolated"] < 0.1 * scalars["energy_drift"]
            assert scalars["energy_drift_half_dt"] < scalars["energy_drift"]
        names = {c.name for c in records["modified-gp-evolution"].checks}
        assert {"modified_gp_energy_drift", "modified_gp_energy_drift_order"} <= names


class TestBogoliubovSuite:
    def test_remainder_constant_settles(self):
        remainder = _records("bogoliubov-check")["nested-remainder"]
        assert remainder.series["n"] == [16.0, 32.0, 64.0]
        constants = remainder.series["remainder_constant"]
        assert constants == pytest.approx(
            [r * n for r, n in zip(remainder.series["nested_remainder"], remainder.series["n"])]
        )
        assert [c.name for c in remainder.checks] == ["nested_remainder_constant_n_stable"]
        assert remainder.checks[0].passed, remainder.checks[0].residual


class TestDepletionSuite:
    def test_growth_record_uses_modified_gp(self):
        records = _records("depletion")
        growth = records["fluctuation-growth"]
        assert growth.metadata["reference"] == "modified-gp"
        assert growth.scalars["reference_weight"] >= 1.0 - 1e-9
        assert records["depletion"].metadata["reference"] == "bare"

    def test_depletion_falls_when_n_doubles(self):
        checks = {c.name: c for c in _records("depletion")["depletion"].checks}
        assert checks["depletion_doubling_N4"].passed
        assert checks["depletion_doubling_N4"].residual <= 0.7
