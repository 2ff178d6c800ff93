"""Excitation map U(φ) between the N-particle sector and F^{≤N}_{⊥φ}.

The mode basis is rotated by a Householder reflection so that φ becomes the
first mode. In the rotated basis a state with N−n particles in φ and
excitation occupations m (over the remaining M−1 modes) is sent to the
excitation state m, which makes U a permutation-like matrix between
explicit orthonormal columns.
"""

import itertools
import logging
from dataclasses import dataclass
from math import comb, factorial, sqrt

import numpy as np

from src.core import fockspace as fs
from src.core.errors import DomainError
from src.core.linalg import dense, opnorm
from src.models.results import CheckResult

logger = logging.getLogger("gp_fluctuations")

UNIT_TOL = 1e-12


def check_unit(phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=complex)
    if abs(np.linalg.norm(phi) - 1.0) > UNIT_TOL:
        raise DomainError(f"condensate coefficients have norm {np.linalg.norm(phi):.15g}", parameter="phi")
    return phi


def householder_completion(phi: np.ndarray) -> np.ndarray:
    """Unitary Q whose first column is φ."""
    phi = check_unit(phi)
    m = len(phi)
    theta = np.angle(phi[0]) if abs(phi[0]) > 0 else 0.0
    x = np.zeros(m, dtype=complex)
    x[0] = np.exp(1j * theta)
    w = x - phi
    q = np.eye(m, dtype=complex)
    if np.linalg.norm(w) > 1e-15:
        q = q - 2 * np.outer(w, w.conj()) / np.vdot(w, w).real
    q[:, 0] = phi
    return q


def orthogonal_projector(phi: np.ndarray) -> np.ndarray:
    """q_φ = 1 − |φ⟩⟨φ| in mode space."""
    phi = np.asarray(phi, dtype=complex)
    return np.eye(len(phi)) - np.outer(phi, phi.conj())


@dataclass
class ExcitationMap:
    """Explicit matrices of U(φ) on an M-mode basis with n_max = N.

    ``isometry`` has the excitation states Π_j a*(q_j)^{m_j}/√(m_j!) Ω as
    columns, ``condensate_frame`` the N-particle states
    Γ(Q)|N−|m|, m⟩ in the same order, so U = isometry · condensate_frame*.
    """
    phi: np.ndarray
    completion: np.ndarray
    basis: fs.FockBasis
    excitation_basis: fs.FockBasis
    isometry: np.ndarray
    condensate_frame: np.ndarray
    n: int

    @property
    def unitary(self) -> np.ndarray:
        return self.isometry @ self.condensate_frame.conj().T

    @property
    def projector(self) -> np.ndarray:
        """Orthogonal projector onto F^{≤N}_{⊥φ}."""
        return self.isometry @ self.isometry.conj().T

    def conjugate(self, operator) -> np.ndarray:
        """U X U* for an operator on the N-sector."""
        g = self.condensate_frame
        x = operator.dense() if isinstance(operator, fs.FockOperator) else dense(operator)
        return self.isometry @ (g.conj().T @ x @ g) @ self.isometry.conj().T


def excitation_map(phi: np.ndarray, basis: fs.FockBasis, n: int | None = None) -> ExcitationMap:
    n = basis.n_max if n is None else n
    if n != basis.n_max:
        raise DomainError(f"excitation map needs n_max = N, got N={n}, n_max={basis.n_max}", parameter="N")
    phi = check_unit(phi)
    if len(phi) != basis.modes:
        raise DomainError(f"phi has {len(phi)} coefficients for {basis.modes} modes", parameter="phi")
    q = householder_completion(phi)
    m = basis.modes

    if m == 1:
        small = None
        occupations = np.zeros((n + 1, 0), dtype=int)
    else:
        small = fs.enumerate_basis(m - 1, n)
        occupations = small.occupations

    creators = [fs.creation(q[:, j], basis).matrix for j in range(m)]
    vacuum = basis.vacuum().coefficients
    iso_cols, frame_cols = [], []
    for occ in occupations:
        excited = int(np.sum(occ))
        v = vacuum
        norm = 1.0
        for j, count in enumerate(occ):
            for _ in range(count):
                v = creators[j + 1] @ v
            norm *= factorial(int(count))
        iso_cols.append(v / sqrt(norm))
        w = v
        for _ in range(n - excited):
            w = creators[0] @ w
        frame_cols.append(w / sqrt(norm * factorial(n - excited)))
        if m == 1:
            break

    return ExcitationMap(
        phi=phi, completion=q, basis=basis, excitation_basis=small,
        isometry=np.array(iso_cols).T, condensate_frame=np.array(frame_cols).T, n=n,
    )


def _require_sector(psi: fs.FockVector, n: int) -> None:
    outside = np.linalg.norm(psi.coefficients) ** 2 - np.linalg.norm(psi.sector(n)) ** 2
    if outside > 1e-20 * max(1.0, psi.norm**2):
        raise DomainError(f"state is not supported on the {n}-particle sector", parameter="psi")


def u_map(phi: np.ndarray, psi: fs.FockVector, emap: ExcitationMap | None = None) -> fs.FockVector:
    """U(φ)ψ_N = ⊕_n q_φ^{⊗n} a(φ)^{N−n}/√((N−n)!) ψ_N."""
    basis = psi.basis
    n = basis.n_max
    phi = check_unit(phi)
    _require_sector(psi, n)
    emap = emap or excitation_map(phi, basis, n)
    lower = fs.annihilation(phi, basis).matrix
    total = np.zeros(basis.dimension, dtype=complex)
    v = psi.coefficients
    for k in range(n + 1):
        total += v / sqrt(factorial(k))
        v = lower @ v
    return fs.FockVector(emap.projector @ total, basis)


def u_inverse(phi: np.ndarray, xi: fs.FockVector) -> fs.FockVector:
    """U*(φ)ξ = Σ_n a*(φ)^{N−n}/√((N−n)!) ξ^{(n)}."""
    basis = xi.basis
    n = basis.n_max
    phi = check_unit(phi)
    raise_op = fs.creation(phi, basis).matrix
    out = np.zeros(basis.dimension, dtype=complex)
    for k in range(n + 1):
        component = np.zeros(basis.dimension, dtype=complex)
        sl = basis.sector(k)
        component[sl] = xi.coefficients[sl]
        for _ in range(n - k):
            component = raise_op @ component
        out += component / sqrt(factorial(n - k))
    return fs.FockVector(out, basis)


def random_orthogonal(phi: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Unit vector orthogonal to φ, drawn in the span of the completion columns 1..M−1."""
    m = len(phi)
    if m < 2:
        raise DomainError("a single mode has no orthogonal complement", parameter="phi")
    q = householder_completion(phi)
    z = rng.standard_normal(m - 1) + 1j * rng.standard_normal(m - 1)
    v = q[:, 1:] @ z
    return v / np.linalg.norm(v)



def random_sector_state(basis: fs.FockBasis, n: int, rng: np.random.Generator) -> fs.FockVector:
    v = np.zeros(basis.dimension, dtype=complex)
    sl = basis.sector(n)
    size = sl.stop - sl.start
    v[sl] = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return fs.FockVector(v / np.linalg.norm(v), basis)


def check_conjugation_rules(
    phi: np.ndarray, basis: fs.FockBasis, n: int, rng: np.random.Generator,
    samples: int = 20, tol: float = 1e-10,
) -> list[CheckResult]:
    """U a*a U* rules plus unitarity, as matrix identities through the explicit U."""
    emap = excitation_map(phi, basis, n)
    p = emap.projector
    sector = np.zeros(basis.dimension)
    sector[basis.sector(n)] = 1.0
    u = emap.unitary
    checks = [
        _check("U*U = 1 on the N-sector", opnorm(u.conj().T @ u - np.diag(sector)), tol),
        _check("UU* = projector onto F_perp", opnorm(u @ u.conj().T - p), tol),
    ]

    a_phi = fs.annihilation(phi, basis)
    c_phi = fs.creation(phi, basis)
    number = fs.number_operator(basis).dense()
    rule1 = emap.conjugate(c_phi @ a_phi) - p @ (n * np.eye(basis.dimension) - number) @ p
    checks.append(_check("U a*(phi)a(phi) U* = N - number", opnorm(rule1), tol))

    worst = {2: 0.0, 3: 0.0, 4: 0.0}
    for _ in range(samples):
        f = random_orthogonal(phi, rng)
        g = random_orthogonal(phi, rng)
        r2 = emap.conjugate(fs.creation(f, basis) @ a_phi) - p @ (sqrt(n) * fs.b_dagger_field(f, basis, n).dense()) @ p
        r3 = emap.conjugate(c_phi @ fs.annihilation(g, basis)) - p @ (sqrt(n) * fs.b_field(g, basis, n).dense()) @ p
        fg = fs.creation(f, basis) @ fs.annihilation(g, basis)
        r4 = emap.conjugate(fg) - p @ fg.dense() @ p
        worst[2] = max(worst[2], opnorm(r2))
        worst[3] = max(worst[3], opnorm(r3))
        worst[4] = max(worst[4], opnorm(r4))
    checks.append(_check("U a*(f)a(phi) U* = sqrt(N) b*(f)", worst[2], tol))
    checks.append(_check("U a*(phi)a(g) U* = sqrt(N) b(g)", worst[3], tol))
    checks.append(_check("U a*(f)a(g) U* = a*(f)a(g)", worst[4], tol))
    return checks


def _check(name: str, residual: float, threshold: float) -> CheckResult:
    return CheckResult(name=name, passed=bool(residual <= threshold), residual=float(residual), threshold=threshold)


def _occupation_of(indices: tuple[int, ...], modes: int) -> tuple[int, ...]:
    occ = [0] * modes
    for i in indices:
        occ[i] += 1
    return tuple(occ)


def _to_tensor(coefficients: np.ndarray, basis: fs.FockBasis, n: int) -> np.ndarray:
    m = basis.modes
    tensor = np.zeros((m,) * n, dtype=complex)
    for idx in itertools.product(range(m), repeat=n):
        occ = _occupation_of(idx, m)
        multiplicity = factorial(n) / np.prod([factorial(c) for c in occ])
        tensor[idx] = coefficients[basis.index(occ)] / sqrt(multiplicity)
    return tensor


def _from_tensor(tensor: np.ndarray, basis: fs.FockBasis, n: int) -> np.ndarray:
    out = np.zeros(basis.dimension, dtype=complex)
    sl = basis.sector(n)
    for i in range(sl.start, sl.stop):
        occ = basis.state(i)
        idx = tuple(j for j, c in enumerate(occ) for _ in range(c))
        multiplicity = factorial(n) / np.prod([factorial(c) for c in occ])
        out[i] = tensor[idx] * sqrt(multiplicity)
    return out


def symmetric_tensor_u_map(phi: np.ndarray, psi: fs.FockVector) -> fs.FockVector:
    """U(φ)ψ_N from dense symmetric tensors; only for cross-checks at M, N ≤ 3."""
    basis = psi.basis
    n = basis.n_max
    if basis.modes > 3 or n > 3:
        raise DomainError("dense tensor cross-check is limited to M, N <= 3", parameter="basis")
    phi = check_unit(phi)
    q = orthogonal_projector(phi)
    tensor = _to_tensor(psi.coefficients, basis, n)
    out = np.zeros(basis.dimension, dtype=complex)
    for k in range(n + 1):
        part = tensor
        for _ in range(n - k):
            part = np.tensordot(part, phi.conj(), axes=([part.ndim - 1], [0]))
        for axis in range(k):
            part = np.moveaxis(np.tensordot(q, part, axes=([1], [axis])), 0, axis)
        out += sqrt(comb(n, k)) * _from_tensor(np.asarray(part), basis, k)
    return fs.FockVector(out, basis)
