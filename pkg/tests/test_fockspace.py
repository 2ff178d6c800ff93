"""Tests for the truncated Fock space, its fields and the Π-monomials."""

from math import comb, sqrt

import numpy as np
import pytest
import scipy.sparse as sp

from src.core import fockspace as fs
from src.core.errors import ConsistencyError, DomainError, ResourceError
from src.models.schemas import PiKind, QuadraticKind, Symmetry
from tests.conftest import make_basis, make_rng, make_unit


def _unit(m: int, i: int) -> np.ndarray:
    e = np.zeros(m, dtype=complex)
    e[i] = 1.0
    return e


class TestBasis:
    def test_dimension_is_binomial(self):
        for modes, n_max in [(1, 5), (2, 3), (3, 4), (4, 2)]:
            assert make_basis(modes, n_max).dimension == comb(n_max + modes, modes)

    def test_sectors_are_contiguous_prefixes(self):
        basis = make_basis(3, 4)
        for n in range(5):
            block = basis.totals[basis.sector(n)]
            assert np.all(block == n)
            assert basis.prefix(n) == comb(n + 3, 3)

    def test_index_and_state_invert(self):
        basis = make_basis(3, 3)
        for i in range(basis.dimension):
            assert basis.index(basis.state(i)) == i

    def test_unknown_occupation(self):
        with pytest.raises(DomainError) as exc_info:
            make_basis(2, 2).index((3, 0))
        assert exc_info.value.parameter == "occupation"

    def test_sector_out_of_range(self):
        with pytest.raises(DomainError):
            make_basis(2, 2).sector(3)

    def test_dimension_cap(self):
        with pytest.raises(ResourceError) as exc_info:
            fs.FockBasis(20, 10)
        assert exc_info.value.requested == comb(30, 20)

    def test_vacuum(self):
        vacuum = make_basis().vacuum()
        assert vacuum.norm == pytest.approx(1.0)
        assert vacuum.sector_norms()[0] == pytest.approx(1.0)


class TestFields:
    def test_annihilation_is_adjoint_of_creation(self):
        basis = make_basis(3, 3)
        f = make_unit(3, seed=1)
        diff = fs.annihilation(f, basis).dense() - fs.creation(f, basis).dense().conj().T
        assert np.max(np.abs(diff)) < 1e-14

    def test_vacuum_annihilated(self):
        basis = make_basis(3, 3)
        out = fs.annihilation(make_unit(3), basis).matrix @ basis.vacuum().coefficients
        assert np.linalg.norm(out) == 0.0

    def test_ccr_below_top_sector(self):
        basis = make_basis(2, 4)
        f, g = make_unit(2, seed=1), make_unit(2, seed=2)
        a_g, c_f = fs.annihilation(g, basis).dense(), fs.creation(f, basis).dense()
        ccr = a_g @ c_f - c_f @ a_g - np.vdot(g, f) * np.eye(basis.dimension)
        assert np.max(np.abs(ccr[:, :basis.prefix(3)])) < 1e-12

    def test_creation_power_state_is_normalized(self):
        basis = make_basis(3, 4)
        v = fs.creation_power_state(make_unit(3), 4, basis)
        assert np.linalg.norm(v) == pytest.approx(1.0)
        assert np.linalg.norm(v[basis.sector(4)]) == pytest.approx(1.0)

    def test_d_gamma_of_identity_is_number(self):
        basis = make_basis(3, 3)
        diff = fs.d_gamma(np.eye(3), basis).dense() - fs.number_operator(basis).dense()
        assert np.max(np.abs(diff)) < 1e-12

    def test_d_gamma_tags_hermitian(self):
        basis = make_basis(2, 3)
        j = fs.random_kernel(2, make_rng())
        assert fs.d_gamma(j + j.conj().T, basis).symmetry == Symmetry.HERMITIAN
        assert fs.d_gamma(j, basis).symmetry == Symmetry.NONE

    def test_wrong_coefficient_shape(self):
        with pytest.raises(DomainError) as exc_info:
            fs.creation(np.ones(4), make_basis(3, 2))
        assert exc_info.value.parameter == "f"


class TestModifiedFields:
    def test_b_adjoint(self):
        basis = make_basis(2, 4)
        f = make_unit(2, seed=3)
        diff = fs.b_field(f, basis, 4).dense() - fs.b_dagger_field(f, basis, 4).dense().conj().T
        assert np.max(np.abs(diff)) < 1e-14

    def test_commutator_identity_holds_on_every_sector(self):
        n = 4
        basis = make_basis(2, n)
        number = fs.number_operator(basis).dense()
        identity = np.eye(basis.dimension)
        for i in range(2):
            for j in range(2):
                b_i = fs.b_field(_unit(2, i), basis, n).dense()
                bd_j = fs.b_dagger_field(_unit(2, j), basis, n).dense()
                hop = (basis.creation_mode(j) @ basis.annihilation_mode(i)).toarray()
                expected = (i == j) * (identity - number / n) - hop / n
                assert np.max(np.abs(b_i @ bd_j - bd_j @ b_i - expected)) < 1e-12

    def test_b_fields_leave_truncated_space(self):
        n = 3
        basis = make_basis(2, n)
        bd = fs.b_dagger_field(make_unit(2), basis, n).dense()
        top = basis.sector(n)
        # b* maps the top sector to zero
        assert np.max(np.abs(bd[:, top])) == 0.0

    def test_b_needs_closed_basis(self):
        with pytest.raises(DomainError) as exc_info:
            fs.b_field(make_unit(2), make_basis(2, 4), 3)
        assert exc_info.value.parameter == "N"

    def test_vector_bounds(self):
        n = 4
        basis = make_basis(3, n)
        rng = make_rng(5)
        f = make_unit(3, seed=5)
        for _ in range(5):
            xi = fs.random_vector(basis, rng)
            lower, upper = fs.b_vector_bounds(f, xi, basis, n)
            assert np.linalg.norm(fs.b_field(f, basis, n).matrix @ xi) <= lower * (1 + 1e-12)
            assert np.linalg.norm(fs.b_dagger_field(f, basis, n).matrix @ xi) <= upper * (1 + 1e-12)


class TestQuadraticFields:
    def test_pair_creation_is_adjoint_of_pair_annihilation(self):
        basis = make_basis(2, 4)
        j = fs.random_kernel(2, make_rng(2))
        creates = fs.quadratic_field(QuadraticKind.B, "**", j, basis).dense()
        annihilates = fs.quadratic_field(QuadraticKind.B, "..", j, basis).dense()
        assert np.max(np.abs(creates - annihilates.conj().T)) < 1e-13

    def test_vector_bound(self):
        basis = make_basis(2, 4)
        rng = make_rng(3)
        j = fs.random_kernel(2, rng)
        for pattern in ("**", "..", "*.", ".*"):
            xi = fs.random_vector(basis, rng)
            op = fs.quadratic_field(QuadraticKind.A, pattern, j, basis)
            bound = fs.quadratic_vector_bound(QuadraticKind.A, pattern, j, xi, basis)
            assert np.linalg.norm(op.matrix @ xi) <= bound * (1 + 1e-12)

    def test_k_factor_adds_trace_when_not_normally_ordered(self):
        j = np.diag([1.0, -2.0])
        assert fs.k_factor(j, "*", ".") == pytest.approx(sqrt(5))
        assert fs.k_factor(j, ".", "*") == pytest.approx(sqrt(5) + 3)

    @pytest.mark.parametrize("pattern", ["*", "*x", "***"])
    def test_invalid_pattern(self, pattern):
        with pytest.raises(DomainError) as exc_info:
            fs.quadratic_field(QuadraticKind.A, pattern, np.eye(2), make_basis(2, 2))
        assert exc_info.value.parameter == "pattern"

    def test_kernel_shape(self):
        with pytest.raises(DomainError) as exc_info:
            fs.quadratic_field(QuadraticKind.A, "**", np.eye(3), make_basis(2, 2))
        assert exc_info.value.parameter == "J"


class TestPiOperators:
    def test_order_one_pi2_is_pair_annihilation(self):
        n = 3
        basis = make_basis(2, n)
        j = fs.random_kernel(2, make_rng(4))
        pi = fs.pi_operator(PiKind.PI2, [j], ".", ".", basis, n).dense()
        pair = fs.quadratic_field(QuadraticKind.B, "..", j.conj(), basis).dense()
        assert np.max(np.abs(pi - pair)) < 1e-12

    @pytest.mark.parametrize("sharps, flats", [("*", "*."), (".", ".*"), ("*.", "*.*"), (".*", ".*.")])
    def test_tilde_pi1_is_adjoint_of_pi1(self, sharps, flats):
        n = 3
        basis = make_basis(2, n)
        rng = make_rng(6)
        kernels = [fs.random_kernel(2, rng) for _ in sharps]
        f = make_unit(2, seed=6)
        pi = fs.pi_operator(PiKind.PI1, kernels, sharps, flats, basis, n, f).dense()
        adj_sharps, adj_flats = fs.pi_adjoint_patterns(sharps, flats)
        adj_kernels = [j.conj().T for j in reversed(kernels)]
        tilde = fs.pi_operator(PiKind.PI1_TILDE, adj_kernels, adj_sharps, adj_flats, basis, n, f).dense()
        scale = max(1.0, np.max(np.abs(pi)))
        assert np.max(np.abs(tilde - pi.conj().T)) / scale < 1e-12

    def test_norm_bound(self):
        n = 3
        basis = make_basis(2, n)
        rng = make_rng(7)
        kernels = [fs.random_kernel(2, rng) for _ in range(2)]
        pi = fs.pi_operator(PiKind.PI2, kernels, "*.", "..", basis, n).dense()
        bound = fs.pi_norm_bound(PiKind.PI2, kernels, "*.", "..", n)
        assert np.linalg.norm(pi, 2) <= bound

    def test_order_zero_pi1_is_b_field(self):
        n = 3
        basis = make_basis(2, n)
        f = make_unit(2, seed=8)
        pi = fs.pi_operator(PiKind.PI1, [], "", "*", basis, n, f).dense()
        assert np.max(np.abs(pi - fs.b_dagger_field(f, basis, n).dense())) < 1e-14

    def test_interior_pair_must_alternate(self):
        j = np.eye(2)
        with pytest.raises(DomainError) as exc_info:
            fs.pi_operator(PiKind.PI2, [j, j], "**", ".*", make_basis(2, 3), 3)
        assert exc_info.value.parameter == "patterns"

    def test_pi1_needs_f(self):
        with pytest.raises(DomainError) as exc_info:
            fs.pi_operator(PiKind.PI1, [np.eye(2)], "*", "*.", make_basis(2, 3), 3)
        assert exc_info.value.parameter == "f"

    def test_k_factors_not_defined_for_tilde(self):
        with pytest.raises(DomainError):
            fs.pi_k_factors(PiKind.PI1_TILDE, [np.eye(2)], "*", ".*")


class TestOperatorTags:
    def test_number_operator_is_hermitian(self):
        assert fs.number_operator(make_basis()).symmetry == Symmetry.HERMITIAN

    def test_false_tag_raises(self):
        basis = make_basis(2, 2)
        m = sp.csr_matrix(np.triu(np.ones((basis.dimension, basis.dimension))))
        with pytest.raises(ConsistencyError):
            fs.FockOperator(m, basis, Symmetry.HERMITIAN)

    def test_random_vector_support(self):
        basis = make_basis(3, 4)
        v = fs.random_vector(basis, make_rng(), max_sector=2)
        assert np.linalg.norm(v) == pytest.approx(1.0)
        assert np.all(v[basis.prefix(2):] == 0)
