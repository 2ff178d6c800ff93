"""Tests for MCP response formatters."""

import numpy as np

from src.mcp.formatters import (
    format_checks,
    format_fock_dimension,
    format_ground_state,
    format_neumann,
    format_run,
    format_scattering_length,
)
from src.models.results import GPState, ScatteringSolution
from tests.conftest import make_check, make_grid, make_record


def _solution(a0: float = 0.5, **extra) -> ScatteringSolution:
    radii = np.linspace(0.0, 4.0, 9)
    f = np.clip(1.0 - a0 / np.maximum(radii, 1.0), 0.0, 1.0)
    return ScatteringSolution(
        radii=radii, u=radii * f, du=np.ones_like(radii), f=f, a0=a0, slope=1.0, support_radius=1.0, **extra
    )


class TestScattering:
    def test_scattering_length(self):
        text = format_scattering_length(_solution(), "square-well")
        assert text.startswith("## Scattering Length (square-well)")
        assert "- **a0**: 0.5" in text
        assert "9 points up to r = 4" in text
        assert "vanishes" not in text

    def test_zero_potential_note(self):
        assert "The potential vanishes; f = 1 everywhere." in format_scattering_length(_solution(0.0), "zero")

    def test_neumann_ratio(self):
        sol = _solution(lambda_ell=0.25, n=8, ell=0.5)
        text = format_neumann(sol, 0.5, (1.0, 2.0))
        assert text.startswith("## Neumann Problem (N = 8, ell = 0.5)")
        assert "- **lambda_ell (N ell)^3 / (3 a0)**: 10.6667" in text
        assert "w <= 1/r" in text

    def test_neumann_without_scattering_length(self):
        text = format_neumann(_solution(0.0, lambda_ell=0.0, n=8, ell=0.5), 0.0, (0.0, 0.0))
        assert "(3 a0)" not in text


class TestGroundState:
    def test_lists_grid(self):
        grid = make_grid(points=64)
        state = GPState(np.ones(64, dtype=complex), grid, a0=0.1)
        text = format_ground_state(state, 1.25, 3e-9)
        assert "- **Energy**: 1.25" in text
        assert "3.00e-09" in text
        assert "64 points" in text


class TestFockDimension:
    def test_within_cap(self):
        text = format_fock_dimension(3, 4, 35, 200000)
        assert "- **dim F^(<=N)**: 35" in text
        assert "Exceeds" not in text

    def test_over_cap(self):
        text = format_fock_dimension(20, 10, 30045015, 200000)
        assert "30,045,015" in text
        assert "Exceeds the configured cap of 200,000" in text


class TestChecks:
    def test_empty(self):
        assert format_checks([]) == "No checks recorded."

    def test_pass_and_fail(self):
        text = format_checks([make_check(), make_check(name="bound", passed=False, detail="20 samples")])
        lines = text.splitlines()
        assert lines[0].startswith("- PASS **identity**")
        assert lines[1].startswith("- FAIL **bound**")
        assert lines[1].endswith("(20 samples)")


class TestRun:
    def test_all_passed(self):
        record = make_record(checks=[make_check()], scalars={"a0": 0.5})
        text = format_run("scatter", [record])
        assert "## Scenario: scatter" in text
        assert "**1 records, 1 checks: all checks passed**" in text
        assert "- a0: 0.5" in text

    def test_failures_counted(self):
        record = make_record(checks=[make_check(), make_check(passed=False)])
        assert "1 of 2 checks failed" in format_run("gp", [record])

    def test_records_without_checks_skipped(self):
        text = format_run("gp", [make_record(name="quiet")])
        assert "### quiet" not in text
