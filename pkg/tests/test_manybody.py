"""Tests for the many-body Hamiltonian, sector evolution and reduced densities."""

import numpy as np
import pytest

from src.core import fockspace as fs
from src.core.errors import DomainError
from src.core.fluctuation import default_condensate
from src.core.manybody import (
    build_hamiltonian,
    depletion,
    evolve,
    number_defect,
    pair_operator,
    potential_matrix,
    product_state,
    propagate,
    reduced_density,
    sector_of,
    trace_norm_distance,
)
from src.core.modes import trig_modes
from src.core.potentials import zero_potential
from src.models.schemas import Symmetry
from tests.conftest import make_basis, make_modes, make_potential, make_unit


class TestHamiltonian:
    def test_hermitian_and_number_conserving(self):
        hamiltonian = build_hamiltonian(make_potential(), 3, make_modes(3))
        assert hamiltonian.operator.symmetry == Symmetry.HERMITIAN
        assert number_defect(hamiltonian.operator.matrix, hamiltonian.basis) == 0.0
        assert hamiltonian.basis.n_max == 3

    def test_zero_potential_is_kinetic_only(self):
        modes = make_modes(3)
        hamiltonian = build_hamiltonian(zero_potential(), 3, modes)
        expected = fs.d_gamma(np.diag(modes.kinetic), hamiltonian.basis).dense()
        assert np.allclose(hamiltonian.operator.dense(), expected)
        assert np.all(hamiltonian.tensor == 0)

    def test_trap_matrix_is_hermitian(self):
        modes = make_modes(3)
        x = np.linspace(-np.pi, np.pi, 64, endpoint=False)
        trap = potential_matrix(modes, x**2)
        assert np.allclose(trap, trap.conj().T)
        assert np.all(np.linalg.eigvalsh(trap) > 0)

    def test_trap_needs_embedding(self):
        with pytest.raises(DomainError) as exc_info:
            potential_matrix(trig_modes(3), np.zeros(64))
        assert exc_info.value.parameter == "modes"

    def test_positive_particle_number(self):
        with pytest.raises(DomainError) as exc_info:
            build_hamiltonian(make_potential(), 0, make_modes(3))
        assert exc_info.value.parameter == "N"

    def test_pair_tensor_shape(self):
        with pytest.raises(DomainError) as exc_info:
            pair_operator(np.zeros((2, 2, 2, 2)), make_basis(3, 2))
        assert exc_info.value.parameter == "tensor"


class TestEvolution:
    def test_norm_energy_and_sector_preserved(self):
        hamiltonian = build_hamiltonian(make_potential(), 3, make_modes(3))
        psi = product_state(default_condensate(3), hamiltonian.basis)
        energy = psi.expectation(hamiltonian.operator).real
        for state in propagate(psi, hamiltonian, [0.0, 0.1, 0.5]):
            assert state.norm == pytest.approx(1.0, abs=1e-12)
            assert sector_of(state) == 3
            assert state.expectation(hamiltonian.operator).real == pytest.approx(energy, rel=1e-10)

    def test_constant_mode_is_stationary_without_interaction(self):
        hamiltonian = build_hamiltonian(zero_potential(), 2, make_modes(3))
        phi = np.array([1.0, 0.0, 0.0], dtype=complex)
        psi = product_state(phi, hamiltonian.basis)
        later = evolve(psi, hamiltonian, 1.0)
        assert np.allclose(later.coefficients, psi.coefficients, atol=1e-12)

    def test_requires_normalized_state(self):
        hamiltonian = build_hamiltonian(zero_potential(), 2, make_modes(2))
        psi = fs.FockVector(2 * hamiltonian.basis.vacuum().coefficients, hamiltonian.basis)
        with pytest.raises(DomainError) as exc_info:
            evolve(psi, hamiltonian, 1.0)
        assert exc_info.value.parameter == "psi"

    def test_requires_positive_step(self):
        hamiltonian = build_hamiltonian(zero_potential(), 2, make_modes(2))
        with pytest.raises(DomainError) as exc_info:
            evolve(hamiltonian.basis.vacuum(), hamiltonian, 1.0, dt=0.0)
        assert exc_info.value.parameter == "dt"

    def test_superposition_has_no_sector(self):
        basis = make_basis(2, 2)
        v = np.zeros(basis.dimension, dtype=complex)
        v[0] = v[-1] = 1 / np.sqrt(2)
        with pytest.raises(DomainError) as exc_info:
            sector_of(fs.FockVector(v, basis))
        assert exc_info.value.parameter == "psi"


class TestReducedDensity:
    def test_product_state_is_fully_condensed(self):
        phi = make_unit(3, seed=3)
        gamma = reduced_density(product_state(phi, make_basis(3, 4)))
        assert gamma.n_particles == 4
        assert gamma.trace == pytest.approx(1.0)
        assert np.allclose(gamma.matrix, np.outer(phi, phi.conj()), atol=1e-12)
        assert depletion(gamma, phi) == pytest.approx(0.0, abs=1e-12)
        assert trace_norm_distance(gamma, phi) == pytest.approx(0.0, abs=1e-10)

    def test_orthogonal_condensate_fully_depleted(self):
        phi = np.array([1.0, 0.0], dtype=complex)
        gamma = reduced_density(product_state(phi, make_basis(2, 3)))
        assert depletion(gamma, np.array([0.0, 1.0], dtype=complex)) == pytest.approx(1.0)

    def test_vacuum_has_no_density(self):
        with pytest.raises(DomainError):
            reduced_density(make_basis(2, 2).vacuum())

    def test_condensate_must_be_normalized(self):
        gamma = reduced_density(product_state(make_unit(2), make_basis(2, 2)))
        with pytest.raises(DomainError) as exc_info:
            depletion(gamma, np.ones(2))
        assert exc_info.value.parameter == "phi"
