"""Tests for radial potentials and their Fourier transforms."""

import numpy as np
import pytest

from src.core.errors import DomainError
from src.core.potentials import (
    RadialPotential,
    build_potential,
    from_table,
    radial_fourier,
    scaled_fourier,
    square_well,
    zero_potential,
)
from src.models.schemas import PotentialSpec
from tests.conftest import make_potential


class TestPresets:
    def test_square_well_support(self):
        V = make_potential()
        assert V(np.array([0.0, 0.5, 1.0, 1.5])) == pytest.approx([10.0, 10.0, 10.0, 0.0])

    def test_zero_height_is_zero_potential(self):
        V = build_potential(PotentialSpec(v0=0.0))
        assert V.is_zero
        assert V.name == "zero"
        assert np.all(V(np.linspace(0, 3, 7)) == 0)

    @pytest.mark.parametrize("preset", ["soft-sphere", "bump"])
    def test_smooth_presets_vanish_at_radius(self, preset):
        V = build_potential(PotentialSpec(preset=preset, v0=4.0, radius=2.0))
        assert V(0.0) == pytest.approx(4.0)
        assert V(2.0) == pytest.approx(0.0, abs=1e-12)

    def test_negative_samples_rejected(self):
        with pytest.raises(DomainError) as exc_info:
            RadialPotential(np.array([0.0, 1.0]), np.array([1.0, -1.0]), 1.0)
        assert exc_info.value.parameter == "V"


class TestTable:
    def test_interpolates_rows(self, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("r,V\n0,2\n1,0\n", encoding="utf-8")
        V = from_table(path)
        assert V.support_radius == 1.0
        assert V(0.5) == pytest.approx(1.0)
        assert V.name == "table:v.csv"

    def test_radii_must_start_at_zero(self, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("r,V\n0.5,2\n1,0\n", encoding="utf-8")
        with pytest.raises(DomainError) as exc_info:
            from_table(path)
        assert exc_info.value.parameter == "potential.table"


class TestFourier:
    def test_square_well_at_zero_momentum(self):
        V = square_well(3.0, 1.0)
        value = radial_fourier(V.radii, V.samples, 0.0)[0]
        assert value == pytest.approx(4 * np.pi * 3.0 / 3, rel=1e-10)

    def test_square_well_closed_form(self):
        V = square_well(1.0, 1.0)
        k = np.array([0.5, 2.0, 5.0])
        exact = 4 * np.pi * (np.sin(k) - k * np.cos(k)) / k**3
        assert radial_fourier(V.radii, V.samples, k) == pytest.approx(exact, rel=1e-8)

    def test_scaling(self):
        V = square_well(1.0, 1.0)
        k = np.array([0.0, 3.0])
        assert scaled_fourier(V.radii, V.samples, k, 2.0) == pytest.approx(
            radial_fourier(V.radii, V.samples, k / 2.0) / 8.0
        )

    def test_zero_potential_samples(self):
        V = zero_potential()
        assert V.is_zero
