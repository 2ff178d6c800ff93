"""Tests for the split-step GP flows, the ground state and the Galerkin flow."""

import numpy as np
import pytest

from src.core import grids
from src.core.errors import DomainError
from src.core.gpdynamics import (
    compare_dynamics,
    coupling,
    euler_lagrange_residual,
    evolve,
    external_potential,
    galerkin_modified_gp,
    gp_energy,
    gp_ground_state,
    gp_step,
    mass,
    modified_gp_step,
    step,
)
from src.core.potentials import zero_potential
from src.models.results import ConvolutionKernel
from src.models.schemas import TrapPreset, Variant
from tests.conftest import make_grid, make_state


def _wide_grid(points: int = 128):
    return make_grid(points=points, length=20.0)


class TestSplitStep:
    def test_mass_conserved(self):
        state = make_state(_wide_grid(), width=1.0, momentum=1.0, a0=0.1)
        _, record = evolve(state, 0.2, 1e-3)
        assert record.scalars["mass_drift"] < 1e-10
        assert len(record.series["t"]) == 201

    def test_negative_step_reverses(self):
        state = make_state(_wide_grid(), a0=0.2)
        back = gp_step(gp_step(state, 0.01), -0.01)
        assert grids.norm(state.grid, back.psi - state.psi) < 1e-12
        assert back.t == pytest.approx(0.0, abs=1e-15)

    def test_free_evolution_is_exact(self):
        grid = _wide_grid()
        state = make_state(grid, width=1.0, momentum=2.0)
        dt = 0.05
        exact = np.fft.ifftn(np.exp(-1j * dt * grids.k_squared(grid)) * np.fft.fftn(state.psi))
        assert np.max(np.abs(gp_step(state, dt).psi - exact)) < 1e-12

    def test_zero_kernel_matches_free_gp(self):
        grid = _wide_grid()
        state = make_state(grid, width=1.0)
        kernel = ConvolutionKernel(np.zeros(grids.shape(grid)), label="zero")
        modified = modified_gp_step(state, 0.01, kernel)
        assert modified.variant == Variant.MODIFIED_GP
        assert np.max(np.abs(modified.psi - gp_step(state, 0.01).psi)) < 1e-13

    def test_energy_drift_small(self):
        state = make_state(_wide_grid(), width=1.0, a0=0.05)
        _, record = evolve(state, 0.5, 1e-3)
        assert record.scalars["energy_drift"] < 1e-4

    def test_step_dispatches_on_variant(self):
        grid = _wide_grid()
        kernel = ConvolutionKernel(np.zeros(grids.shape(grid)))
        state = make_state(grid, variant=Variant.MODIFIED_GP, kernel=kernel)
        assert step(state, 0.01).variant == Variant.MODIFIED_GP

    def test_zero_dt_rejected(self):
        with pytest.raises(DomainError) as exc_info:
            gp_step(make_state(), 0.0)
        assert exc_info.value.parameter == "dt"

    def test_gp_step_rejects_modified_state(self):
        grid = make_grid()
        state = make_state(grid, variant=Variant.MODIFIED_GP, kernel=ConvolutionKernel(np.zeros(grids.shape(grid))))
        with pytest.raises(DomainError) as exc_info:
            gp_step(state, 0.01)
        assert exc_info.value.parameter == "variant"

    def test_modified_step_needs_kernel(self):
        with pytest.raises(DomainError) as exc_info:
            modified_gp_step(make_state(), 0.01)
        assert exc_info.value.parameter == "kernel"


class TestCoupling:
    def test_quasi_one_dimensional_divides_by_area(self):
        assert coupling(0.5, make_grid(transverse_area=2.0)) == pytest.approx(2 * np.pi)

    def test_three_dimensional(self):
        assert coupling(0.5, make_grid(points=8, dimension=3)) == pytest.approx(4 * np.pi)


class TestGroundState:
    def test_harmonic_trap_without_interaction(self):
        grid = _wide_grid()
        v_ext = external_potential(grid, TrapPreset.HARMONIC, 1.0)
        state = gp_ground_state(v_ext, 0.0, grid, tol=1e-8)
        assert gp_energy(state) == pytest.approx(1.0, abs=1e-6)
        assert euler_lagrange_residual(state) <= 1e-7
        assert mass(state) == pytest.approx(1.0)

    def test_interaction_raises_energy(self):
        grid = _wide_grid()
        v_ext = external_potential(grid, TrapPreset.HARMONIC, 1.0)
        free = gp_energy(gp_ground_state(v_ext, 0.0, grid, tol=1e-8))
        interacting = gp_energy(gp_ground_state(v_ext, 0.05, grid, tol=1e-8))
        assert interacting > free

    def test_shape_mismatch(self):
        with pytest.raises(DomainError) as exc_info:
            gp_ground_state(np.zeros(10), 0.0, _wide_grid())
        assert exc_info.value.parameter == "v_ext"

    def test_no_trap_is_zero_potential(self):
        assert np.all(external_potential(_wide_grid(), TrapPreset.NONE) == 0.0)


class TestCompareDynamics:
    def test_zero_potential_gives_identical_flows(self):
        state = make_state(_wide_grid(64), width=1.0)
        record = compare_dynamics(state, [10, 20], 0.05, 1e-2, potential=zero_potential())
        assert record.series["sup_difference"] == [0.0, 0.0]
        assert "slope" not in record.scalars

    def test_needs_potential_or_kernels(self):
        with pytest.raises(DomainError) as exc_info:
            compare_dynamics(make_state(), [10], 0.1)
        assert exc_info.value.parameter == "potential"


class TestGalerkin:
    def test_free_flow_is_phase_rotation(self):
        kinetic = np.array([0.0, 1.0, 4.0])
        c0 = np.array([0.6, 0.0, 0.8], dtype=complex)
        times = np.linspace(0.0, 1.0, 5)
        trajectory = galerkin_modified_gp(c0, kinetic, np.zeros((3, 3, 3, 3)), times)
        exact = np.exp(-1j * np.outer(times, kinetic)) * c0
        assert np.max(np.abs(trajectory.coefficients - exact)) < 1e-9

    def test_constant_times_returns_initial(self):
        c0 = np.array([1.0, 0.0], dtype=complex)
        trajectory = galerkin_modified_gp(c0, np.zeros(2), np.zeros((2, 2, 2, 2)), np.array([0.0, 0.0]))
        assert np.all(trajectory.at(0.0) == c0)

    def test_unnormalized_coefficients_rejected(self):
        with pytest.raises(DomainError) as exc_info:
            galerkin_modified_gp(np.array([1.0, 1.0]), np.zeros(2), np.zeros((2, 2, 2, 2)), np.array([0.0, 1.0]))
        assert exc_info.value.parameter == "c0"
