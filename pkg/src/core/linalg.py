"""Dense and sparse linear-algebra helpers shared by the many-body modules."""

import logging

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from src.core.errors import DomainError, ResourceError, SolverError
from src.core.settings import get_settings

logger = logging.getLogger("gp_fluctuations")


def dense(matrix) -> np.ndarray:
    return matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)


def opnorm(matrix) -> float:
    """Operator (largest singular value) norm."""
    m = dense(matrix)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def hermitian_part(matrix) -> np.ndarray:
    m = dense(matrix)
    return 0.5 * (m + m.conj().T)


def commutator(a, b):
    return a @ b - b @ a


def check_sparsity(matrix, what: str = "operator") -> None:
    nnz = matrix.nnz if sp.issparse(matrix) else int(np.count_nonzero(matrix))
    budget = get_settings().sparsity_budget
    if nnz > budget:
        raise ResourceError(f"{what} nonzeros", nnz, budget)


def form_gap(x, y) -> float:
    """Smallest eigenvalue of Y − X; X ≤ Y as forms iff this is ≥ 0."""
    return float(np.linalg.eigvalsh(hermitian_part(dense(y) - dense(x)))[0])


def form_leq(x, y, rtol: float = 1e-9) -> bool:
    """X ≤ Y up to −rtol·‖Y‖."""
    return form_gap(x, y) >= -rtol * max(1.0, opnorm(y))


def max_generalized_eigenvalue(a, b) -> float:
    """Largest λ with A v = λ B v for hermitian A and positive definite B.

    This is the smallest C with A ≤ C·B.
    """
    a, b = hermitian_part(a), hermitian_part(b)
    try:
        values = sla.eigh(a, b, eigvals_only=True)
    except np.linalg.LinAlgError as e:
        raise SolverError(f"generalized eigenproblem failed: {e}") from e
    return float(values[-1])


def compress(isometry, operator) -> np.ndarray:
    """J* X J for an isometry J."""
    j = dense(isometry)
    return j.conj().T @ dense(operator) @ j


def exp_antihermitian(b) -> np.ndarray:
    """e^{B} for antihermitian B.

    Below the dense threshold iB is diagonalized; larger matrices go through
    scaling and squaring.
    """
    m = dense(b) if sp.issparse(b) and b.shape[0] <= get_settings().dense_threshold else b
    if sp.issparse(m):
        return dense(spla.expm(sp.csc_matrix(m)))
    m = np.asarray(m)
    defect = np.max(np.abs(m + m.conj().T)) if m.size else 0.0
    if defect > 1e-12 * max(1.0, np.max(np.abs(m), initial=0.0)):
        raise DomainError(f"matrix is not antihermitian (defect {defect:.2e})", parameter="B")
    if m.shape[0] > get_settings().dense_threshold:
        return sla.expm(m)
    values, vectors = np.linalg.eigh(1j * m)
    return (vectors * np.exp(-1j * values)) @ vectors.conj().T


def hermitian_evolution(h, t: float) -> np.ndarray:
    """e^{−itH} for hermitian H by eigendecomposition."""
    values, vectors = np.linalg.eigh(hermitian_part(h))
    return (vectors * np.exp(-1j * t * values)) @ vectors.conj().T


def krylov_expmv(matvec, v: np.ndarray, t: complex = 1.0, tol: float = 1e-12, m_max: int = 60) -> np.ndarray:
    """exp(t·A)v by Arnoldi projection onto a Krylov space.

    Converged when two consecutive projected approximations differ by less
    than ``tol`` relative to ‖v‖.
    """
    v = np.asarray(v, dtype=complex)
    beta = np.linalg.norm(v)
    if beta == 0:
        return np.zeros_like(v)
    n = len(v)
    m_max = min(m_max, n)
    basis = np.zeros((n, m_max + 1), dtype=complex)
    hess = np.zeros((m_max + 1, m_max), dtype=complex)
    basis[:, 0] = v / beta
    previous = None

    for m in range(1, m_max + 1):
        w = matvec(basis[:, m - 1])
        for j in range(m):
            hess[j, m - 1] = np.vdot(basis[:, j], w)
            w = w - hess[j, m - 1] * basis[:, j]
        hess[m, m - 1] = np.linalg.norm(w)
        small = sla.expm(t * hess[:m, :m])[:, 0]
        u = beta * basis[:, :m] @ small
        if hess[m, m - 1] < 1e-14 * beta:
            # invariant subspace: the projection is exact
            return u
        basis[:, m] = w / hess[m, m - 1]
        if previous is not None and np.linalg.norm(u - previous) < tol * beta:
            logger.debug("Krylov expmv converged with dimension %d", m)
            return u
        previous = u
    if m_max == n:
        return u
    raise SolverError(f"Krylov projection did not converge within dimension {m_max}")
