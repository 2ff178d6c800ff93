"""Tests for Pydantic input model validation."""

import pytest
from pydantic import ValidationError

from src.models.schemas import (
    DepletionBlock,
    FockDimensionInput,
    GeneratorBlock,
    PotentialPreset,
    PotentialSpec,
    RunConfig,
    RunScenarioInput,
    Scenario,
    SpatialGrid,
)


class TestSpatialGrid:
    def test_defaults(self):
        grid = SpatialGrid()
        assert grid.dimension == 1
        assert grid.points == 256

    @pytest.mark.parametrize("points", [0, 1, 48, 100])
    def test_points_must_be_power_of_two(self, points):
        with pytest.raises(ValidationError, match="power of two"):
            SpatialGrid(points=points)

    def test_dimension_one_or_three(self):
        assert SpatialGrid(dimension=3, points=16).dimension == 3
        with pytest.raises(ValidationError, match="1 or 3"):
            SpatialGrid(dimension=2)

    def test_frozen(self):
        grid = SpatialGrid()
        with pytest.raises(ValidationError):
            grid.points = 128  # type: ignore[misc]


class TestPotentialSpec:
    def test_table_needs_path(self):
        with pytest.raises(ValidationError, match="table path"):
            PotentialSpec(preset="table")

    def test_table_with_path(self, tmp_path):
        spec = PotentialSpec(preset="table", table=tmp_path / "v.csv")
        assert spec.preset == PotentialPreset.TABLE

    def test_negative_height_rejected(self):
        with pytest.raises(ValidationError):
            PotentialSpec(v0=-1.0)


class TestListKeys:
    def test_comma_separated_strings(self):
        block = DepletionBlock(n_values="2, 4,8")
        assert block.n_values == [2, 4, 8]

    def test_float_lists(self):
        block = GeneratorBlock(bound_times="0, 0.05")
        assert block.bound_times == [0.0, 0.05]

    def test_single_value(self):
        assert DepletionBlock(n_values=6).n_values == [6]


class TestRunConfig:
    def test_unknown_block_key_rejected(self):
        with pytest.raises(ValidationError):
            RunConfig(scenario="gp", gp={"bogus": 1})

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(ValidationError):
            RunConfig(scenario="gp", colour="blue")

    def test_scenario_enum(self):
        assert RunConfig(scenario="all-regressions").scenario == Scenario.ALL_REGRESSIONS
        with pytest.raises(ValidationError):
            RunConfig(scenario="tunnelling")


class TestToolInputs:
    def test_fock_dimension_requires_modes(self):
        with pytest.raises(ValidationError):
            FockDimensionInput(n_max=3)  # type: ignore[call-arg]

    def test_run_scenario_overrides(self):
        inp = RunScenarioInput(scenario="fock-check", overrides={"fock.modes": "2"})
        assert inp.overrides == {"fock.modes": "2"}
        assert inp.seed == 0
