"""Tests for generalized Bogoliubov transformations and their nested commutators."""

import numpy as np
import pytest
from scipy.linalg import coshm, sinhm

from src.core import fockspace as fs
from src.core.bogoliubov import (
    PairKernel,
    build_B,
    exp_B,
    first_commutator_closed_form,
    hyperbolic_kernels,
    kernel_power,
    nested_ad,
    nested_remainder,
    npow_bound_check,
    series_conjugation,
    standard_bogoliubov_action_check,
)
from src.core.errors import DomainError
from src.core.excitations import excitation_map
from src.core.linalg import opnorm
from src.models.schemas import Symmetry
from tests.conftest import make_basis, make_kernel, make_unit


class TestPairKernel:
    def test_rejects_asymmetric(self):
        with pytest.raises(DomainError) as exc_info:
            PairKernel(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert exc_info.value.parameter == "eta"

    def test_rejects_non_square(self):
        with pytest.raises(DomainError):
            PairKernel(np.zeros((2, 3)))

    def test_rejects_kernel_touching_phi(self):
        phi = np.array([1.0, 0.0], dtype=complex)
        with pytest.raises(DomainError):
            PairKernel(np.eye(2), phi)

    def test_scaled_kernel_norm_and_orthogonality(self):
        phi = make_unit(3, seed=2, real=True)
        kernel = make_kernel(3, 0.3, seed=2, phi=phi)
        assert kernel.norm == pytest.approx(0.3)
        assert kernel.orthogonality_residual(phi) < 1e-12
        assert np.allclose(kernel.eta, kernel.eta.T)


class TestTransformation:
    def test_generator_is_antihermitian_and_exponential_unitary(self):
        n = 4
        basis = make_basis(2, n)
        b = build_B(make_kernel(2, 0.2), basis, n)
        assert b.symmetry == Symmetry.ANTIHERMITIAN
        u = exp_B(b)
        assert u.symmetry == Symmetry.UNITARY
        assert opnorm(u.dense().conj().T @ u.dense() - np.eye(basis.dimension)) < 1e-10

    def test_preserves_excitation_space(self):
        n = 3
        basis = make_basis(3, n)
        phi = make_unit(3, seed=4, real=True)
        u = exp_B(build_B(make_kernel(3, 0.2, seed=4, phi=phi), basis, n)).dense()
        p = excitation_map(phi, basis, n).projector
        assert opnorm((np.eye(basis.dimension) - p) @ u @ p) < 1e-10

    def test_exp_needs_antihermitian(self):
        basis = make_basis(2, 2)
        with pytest.raises(DomainError) as exc_info:
            exp_B(fs.number_operator(basis))
        assert exc_info.value.parameter == "B"

    def test_zero_kernel_gives_identity(self):
        n = 3
        basis = make_basis(2, n)
        u = exp_B(build_B(np.zeros((2, 2)), basis, n)).dense()
        assert np.allclose(u, np.eye(basis.dimension))
        assert npow_bound_check(np.zeros((2, 2)), 1, 0, basis, n) == pytest.approx(1.0)


class TestHyperbolicKernels:
    def test_real_kernel_matches_matrix_functions(self):
        eta = np.array([[0.1, 0.05], [0.05, -0.2]])
        pair = hyperbolic_kernels(eta)
        assert np.allclose(pair.cosh, coshm(eta), atol=1e-14)
        assert np.allclose(pair.sinh, sinhm(eta), atol=1e-14)
        assert np.allclose(pair.cosh @ pair.cosh - pair.sinh @ pair.sinh, np.eye(2), atol=1e-14)

    def test_remainders(self):
        kernel = make_kernel(3, 0.3)
        pair = hyperbolic_kernels(kernel)
        assert np.allclose(pair.p, pair.cosh - np.eye(3))
        assert np.allclose(pair.r, pair.sinh - kernel.eta)
        assert np.linalg.norm(pair.p) <= np.cosh(0.3) - 1 + 1e-14
        assert np.linalg.norm(pair.r) <= np.sinh(0.3) - 0.3 + 1e-14

    def test_kernel_powers_alternate_conjugation(self):
        eta = make_kernel(2, 0.5).eta
        assert np.allclose(kernel_power(eta, 0), np.eye(2))
        assert np.allclose(kernel_power(eta, 3), eta @ eta.conj() @ eta)

    def test_negative_power(self):
        with pytest.raises(DomainError) as exc_info:
            kernel_power(np.zeros((2, 2)), -1)
        assert exc_info.value.parameter == "n"


class TestNestedCommutators:
    def test_first_commutator_closed_form(self):
        n = 4
        basis = make_basis(2, n)
        kernel = make_kernel(2, 0.2, seed=1)
        f = make_unit(2, seed=1)
        first = nested_ad(build_B(kernel, basis, n), fs.b_field(f, basis, n), 1).dense()
        closed = first_commutator_closed_form(kernel, f, basis, n).dense()
        assert opnorm(first - closed) < 1e-12

    def test_series_converges_to_conjugation(self):
        n = 4
        basis = make_basis(2, n)
        result = series_conjugation(make_kernel(2, 0.2, seed=3), make_unit(2, seed=3), 12, basis, n)
        assert len(result.residuals) == 13
        assert result.residual < 1e-8
        assert result.residual < result.residuals[0]
        assert not result.diverging

    def test_order_zero_remainder_vanishes(self):
        n = 4
        basis = make_basis(2, n)
        assert nested_remainder(make_kernel(2, 0.2), make_unit(2), 0, basis, n) < 1e-15

    def test_nested_order_capped(self):
        n = 2
        basis = make_basis(2, n)
        b = build_B(make_kernel(2, 0.2), basis, n)
        with pytest.raises(DomainError) as exc_info:
            nested_ad(b, fs.b_field(make_unit(2), basis, n), 100)
        assert exc_info.value.parameter == "n"


class TestStandardAction:
    def test_truncation_artifact_shrinks(self):
        action = standard_bogoliubov_action_check(make_kernel(2, 0.2), make_unit(2), 2, [12, 24])
        assert action[24] < action[12]
        assert action[24] < 1e-6
