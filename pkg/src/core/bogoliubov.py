"""Generalized Bogoliubov transformations e^{B(η)} on F^{≤N}.

B(η) = ½Σ[η(x;y) b*_x b*_y − η̄(x;y) b_x b_y] is built from the modified
fields, so e^{B(η)} maps F^{≤N} to itself. Its action on b-fields has no
closed form; it is expanded in nested commutators, and the standard
Bogoliubov transformation (same kernel, plain a-fields) serves as the
reference whose action is the explicit cosh/sinh formula.
"""

import logging
from dataclasses import dataclass
from math import factorial
from typing import Optional

import numpy as np

from src.core import fockspace as fs
from src.core.errors import DomainError
from src.core.linalg import check_sparsity, exp_antihermitian, max_generalized_eigenvalue, opnorm
from src.core.settings import get_settings
from src.models.results import HyperbolicPair, SeriesResult
from src.models.schemas import QuadraticKind, Symmetry

logger = logging.getLogger("gp_fluctuations")

SYMMETRY_TOL = 1e-12
SERIES_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class PairKernel:
    """Symmetric mode-space kernel η, optionally tagged as orthogonal to φ."""
    eta: np.ndarray
    phi: Optional[np.ndarray] = None

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=complex)
        if eta.ndim != 2 or eta.shape[0] != eta.shape[1]:
            raise DomainError(f"kernel must be square, got shape {eta.shape}", parameter="eta")
        defect = float(np.max(np.abs(eta - eta.T))) if eta.size else 0.0
        if defect > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(eta), initial=0.0))):
            raise DomainError(f"kernel is not symmetric (defect {defect:.2e})", parameter="eta")
        object.__setattr__(self, "eta", eta)
        if self.phi is not None:
            residual = self.orthogonality_residual(self.phi)
            if residual > SYMMETRY_TOL:
                raise DomainError(f"kernel is not orthogonal to phi (residual {residual:.2e})", parameter="eta")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.eta))

    def orthogonality_residual(self, phi: np.ndarray) -> float:
        phi = np.asarray(phi, dtype=complex)
        q = np.eye(len(phi)) - np.outer(phi, phi.conj())
        return float(np.linalg.norm(q @ self.eta @ q.conj() - self.eta))


def _as_kernel(eta) -> PairKernel:
    return eta if isinstance(eta, PairKernel) else PairKernel(np.asarray(eta))


def build_B(eta, basis: fs.FockBasis, n: int) -> fs.FockOperator:
    """B(η) = ½(B_{**}(η) − B_{**}(η)*), antihermitian on F^{≤N}."""
    kernel = _as_kernel(eta)
    pair = fs.quadratic_field(QuadraticKind.B, "**", kernel.eta, basis, n).matrix
    matrix = 0.5 * (pair - pair.conj().T)
    return fs.FockOperator(matrix.tocsr(), basis, Symmetry.ANTIHERMITIAN, label="B(eta)")


def standard_B(eta, basis: fs.FockBasis) -> fs.FockOperator:
    """B̃(η) = ½Σ[η a*_x a*_y − η̄ a_x a_y] with the truncated a-fields."""
    kernel = _as_kernel(eta)
    pair = fs.quadratic_field(QuadraticKind.A, "**", kernel.eta, basis).matrix
    matrix = 0.5 * (pair - pair.conj().T)
    return fs.FockOperator(matrix.tocsr(), basis, Symmetry.ANTIHERMITIAN, label="B~(eta)")


def exp_B(b: fs.FockOperator) -> fs.FockOperator:
    if b.symmetry != Symmetry.ANTIHERMITIAN:
        raise DomainError(f"exp_B needs an antihermitian operator, got {b.symmetry.value}", parameter="B")
    return fs.FockOperator(exp_antihermitian(b.matrix), b.basis, Symmetry.UNITARY, label="exp(B)")


def kernel_power(eta, n: int) -> np.ndarray:
    """η^{(n)}: 1, η, ηη̄, ηη̄η, ... as operator products."""
    if n < 0:
        raise DomainError(f"power must be nonnegative, got {n}", parameter="n")
    eta = np.asarray(_as_kernel(eta).eta)
    out = np.eye(eta.shape[0], dtype=complex)
    for k in range(n):
        out = out @ (eta if k % 2 == 0 else eta.conj())
    return out


def hyperbolic_kernels(eta) -> HyperbolicPair:
    """cosh_η = Σ(ηη̄)ⁿ/(2n)!, sinh_η = Σ(ηη̄)ⁿη/(2n+1)!."""
    eta = np.asarray(_as_kernel(eta).eta)
    m = eta.shape[0]
    square = eta @ eta.conj()
    power = np.eye(m, dtype=complex)
    cosh = np.zeros((m, m), dtype=complex)
    sinh = np.zeros((m, m), dtype=complex)
    n = 0
    while True:
        c_term = power / factorial(2 * n)
        s_term = power @ eta / factorial(2 * n + 1)
        cosh += c_term
        sinh += s_term
        n += 1
        if max(np.linalg.norm(c_term), np.linalg.norm(s_term)) < SERIES_TOL or n > 200:
            break
        power = power @ square
    return HyperbolicPair(eta=eta, cosh=cosh, sinh=sinh, terms=n)


def standard_bogoliubov_action_check(
    eta, f: np.ndarray, modes: int, truncations: list[int], low_sector: int = 4
) -> dict[int, float]:
    """‖(e^{−B̃}a(f)e^{B̃} − a(cosh_η f) − a*(sinh_η f̄))χ(𝒩 ≤ low)‖ per truncation.

    Large truncations emulate the full Fock space; the residual is a pure
    truncation artifact and shrinks as n_max grows.
    """
    pair = hyperbolic_kernels(eta)
    f = np.asarray(f, dtype=complex)
    residuals = {}
    for n_max in truncations:
        basis = fs.enumerate_basis(modes, n_max)
        u = exp_B(standard_B(eta, basis)).dense()
        a_f = fs.annihilation(f, basis).dense()
        lhs = u.conj().T @ a_f @ u
        rhs = fs.annihilation(pair.cosh @ f, basis).dense() + fs.creation(pair.sinh @ f.conj(), basis).dense()
        cols = basis.prefix(low_sector)
        residuals[n_max] = opnorm((lhs - rhs)[:, :cols])
        logger.debug("standard Bogoliubov action: n_max=%d residual=%.3e", n_max, residuals[n_max])
    return residuals


def nested_ad(b: fs.FockOperator, a: fs.FockOperator, n: int) -> fs.FockOperator:
    """ad^{(n)}_B(A) = [B, ad^{(n−1)}_B(A)]."""
    cap = get_settings().max_nested_order
    if n > cap:
        raise DomainError(f"nested order {n} exceeds the configured maximum {cap}", parameter="n")
    current = a.matrix
    for _ in range(n):
        current = b.matrix @ current - current @ b.matrix
        check_sparsity(current, "nested commutator")
    return fs.FockOperator(current, a.basis, label=f"ad^{n}")


def first_commutator_closed_form(eta, f: np.ndarray, basis: fs.FockBasis, n: int) -> fs.FockOperator:
    """[B(η), b(f)] = −((N−𝒩)/N) b*(ηf̄) + (1/N)Σ η(x;y) b*_x a*_y a(f)."""
    kernel = np.asarray(_as_kernel(eta).eta)
    f = np.asarray(f, dtype=complex)
    weight = basis.weight(lambda k: (n - k) / n)
    first = -(weight @ fs.b_dagger_field(kernel @ f.conj(), basis, n).matrix)
    a_f = fs.annihilation(f, basis).matrix
    second = None
    for x in range(basis.modes):
        unit = np.zeros(basis.modes)
        unit[x] = 1.0
        term = fs.b_dagger_field(unit, basis, n).matrix @ fs.creation(kernel[x], basis).matrix @ a_f
        second = term if second is None else second + term
    return fs.FockOperator((first + second / n).tocsr(), basis, label="[B, b(f)]")


def leading_nested_term(eta, f: np.ndarray, order: int, basis: fs.FockBasis, n: int) -> fs.FockOperator:
    """The single identity-resolved term of ad^{(order)}_{B(η)}(b(f))."""
    f = np.asarray(f, dtype=complex)
    power = kernel_power(eta, order)

    def weights(p: int, q: int):
        return basis.weight(lambda k: ((n - k) / n) ** p * ((n + 1 - k) / n) ** q)

    if order % 2 == 0:
        factors = weights(order // 2, order // 2)
        field = fs.b_field(power @ f, basis, n).matrix
        return fs.FockOperator((factors @ field).tocsr(), basis, label=f"lead^{order}")
    factors = weights((order + 1) // 2, (order - 1) // 2)
    field = fs.b_dagger_field(power @ f.conj(), basis, n).matrix
    return fs.FockOperator((-(factors @ field)).tocsr(), basis, label=f"lead^{order}")


def nested_remainder(eta, f: np.ndarray, order: int, basis: fs.FockBasis, n: int, low_sector: int = 2) -> float:
    """‖(ad^{(order)}(b(f)) − leading term)χ(𝒩 ≤ low_sector)‖."""
    b = build_B(eta, basis, n)
    full = nested_ad(b, fs.b_field(f, basis, n), order).dense()
    lead = leading_nested_term(eta, f, order, basis, n).dense()
    return opnorm((full - lead)[:, :basis.prefix(low_sector)])


def series_conjugation(eta, f: np.ndarray, order: int, basis: fs.FockBasis, n: int,
                       smallness: float = 0.25) -> SeriesResult:
    """Σ_{k≤order} (−1)^k/k! ad^{(k)}_B(b(f)) against e^{−B} b(f) e^{B}."""
    kernel = _as_kernel(eta)
    if kernel.norm > smallness:
        logger.warning("kernel norm %.3g exceeds the smallness threshold %.3g", kernel.norm, smallness)
    b = build_B(kernel, basis, n)
    a = fs.b_field(f, basis, n)
    u = exp_B(b).dense()
    exact = u.conj().T @ a.dense() @ u

    term = a.dense()
    bd = b.dense()
    partial = term.copy()
    residuals = [opnorm(partial - exact)]
    for k in range(1, order + 1):
        term = (bd @ term - term @ bd) * (-1.0 / k)
        partial = partial + term
        residuals.append(opnorm(partial - exact))

    rising = 0
    diverging = False
    for prev, cur in zip(residuals, residuals[1:]):
        rising = rising + 1 if cur > prev else 0
        if rising >= 3:
            diverging = True
            break
    if diverging:
        logger.warning("nested commutator series diverging at ||eta||=%.3g", kernel.norm)
    return SeriesResult(
        operator=fs.FockOperator(partial, basis, label="series"), residual=residuals[-1],
        residuals=residuals, diverging=diverging,
    )


def npow_bound_check(eta, n1: int, n2: int, basis: fs.FockBasis, n: int) -> float:
    """Smallest C with e^{−B}(𝒩+1)^{n1}(N+1−𝒩)^{n2}e^{B} ≤ C(𝒩+1)^{n1}(N+1−𝒩)^{n2}."""
    u = exp_B(build_B(eta, basis, n)).dense()
    weight = basis.weight(lambda k: (k + 1.0) ** n1 * (n + 1.0 - k) ** n2).toarray()
    return max_generalized_eigenvalue(u.conj().T @ weight @ u, weight)


def scaled_kernel(modes: int, norm: float, rng: np.random.Generator, phi: Optional[np.ndarray] = None) -> PairKernel:
    """Random symmetric kernel with ‖η‖₂ = norm, projected off φ when given."""
    eta = fs.random_kernel(modes, rng, symmetric=True)
    if phi is not None:
        phi = np.asarray(phi, dtype=complex)
        q = np.eye(modes) - np.outer(phi, phi.conj())
        eta = q @ eta @ q.conj()
        eta = 0.5 * (eta + eta.T)
    current = np.linalg.norm(eta)
    eta = eta * (norm / current) if current > 0 else eta
    return PairKernel(eta, phi)
