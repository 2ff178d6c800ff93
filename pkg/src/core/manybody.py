"""Many-body Hamiltonian on a truncated mode basis, exact evolution and reduced densities.

𝓗_N = dΓ(h) + ½ Σ T_{pqrs} a*_p a*_q a_s a_r with h the kinetic matrix of
the modes (plus an optional trap) and T the mode tensor of N²V(N·).
Evolution is always restricted to the particle-number sector that carries
the state.
"""

import logging
from math import ceil
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from src.core import fockspace as fs
from src.core import grids
from src.core.errors import ConsistencyError, DomainError, SolverError
from src.core.linalg import krylov_expmv
from src.core.modes import interaction_tensor
from src.core.potentials import RadialPotential
from src.core.scattering import pair_transform
from src.core.settings import get_settings
from src.models.results import ManyBodyHamiltonian, ModeBasis, ReducedDensity
from src.models.schemas import Symmetry

logger = logging.getLogger("gp_fluctuations")

NORM_DRIFT_TOL = 1e-9
DENSITY_TOL = 1e-12
_TENSOR_CUTOFF = 1e-15


def transverse_area(modes: ModeBasis) -> float:
    if modes.dimension == 1 and modes.grid is not None:
        return modes.grid.transverse_area
    return 1.0


def mode_tensor(modes: ModeBasis, transform) -> np.ndarray:
    """Two-body tensor ⟨e_p⊗e_q, K e_r⊗e_s⟩ of a radial kernel given by its transform."""
    return interaction_tensor(modes, transform, transverse_area(modes))


def pair_tensor(V: RadialPotential, n: int, modes: ModeBasis) -> np.ndarray:
    if V.is_zero:
        return np.zeros((modes.m,) * 4, dtype=complex)
    return mode_tensor(modes, pair_transform(V, n))


def potential_matrix(modes: ModeBasis, v_ext: np.ndarray) -> np.ndarray:
    """⟨e_i, V_ext e_j⟩ by grid quadrature."""
    if modes.embedding is None or modes.grid is None:
        raise DomainError("trap matrix needs a mode basis embedded on a grid", parameter="modes")
    if v_ext.shape != modes.embedding.shape[1:]:
        raise DomainError(f"trap shape {v_ext.shape} does not match the mode grid", parameter="v_ext")
    flat = modes.embedding.reshape(modes.m, -1)
    matrix = (flat.conj() * v_ext.reshape(-1)) @ flat.T * grids.cell_volume(modes.grid)
    return 0.5 * (matrix + matrix.conj().T)


def pair_operator(tensor: np.ndarray, basis: fs.FockBasis) -> sp.csr_matrix:
    """½ Σ T_{pqrs} a*_p a*_q a_s a_r as a sparse matrix."""
    m = basis.modes
    if tensor.shape != (m,) * 4:
        raise DomainError(f"pair tensor has shape {tensor.shape} for {m} modes", parameter="tensor")
    d = basis.dimension
    out = sp.csr_matrix((d, d), dtype=complex)
    lowered: dict[tuple[int, int], sp.csr_matrix] = {}
    for p in range(m):
        for q in range(m):
            block = tensor[p, q]
            if not np.any(np.abs(block) > _TENSOR_CUTOFF):
                continue
            inner = sp.csr_matrix((d, d), dtype=complex)
            for r, s in zip(*np.nonzero(np.abs(block) > _TENSOR_CUTOFF)):
                key = (int(r), int(s))
                if key not in lowered:
                    lowered[key] = (basis.annihilation_mode(key[1]) @ basis.annihilation_mode(key[0])).tocsr()
                inner = inner + block[r, s] * lowered[key]
            out = out + (basis.creation_mode(p) @ basis.creation_mode(q)) @ inner
    return (0.5 * out).tocsr()


def number_defect(matrix, basis: fs.FockBasis) -> float:
    """max |X_ij| over entries that connect different particle numbers, i.e. ‖[X, 𝒩]‖_max."""
    coo = sp.coo_matrix(matrix)
    jumps = basis.totals[coo.row] != basis.totals[coo.col]
    return float(np.max(np.abs(coo.data[jumps]), initial=0.0))


def build_hamiltonian(
    V: RadialPotential,
    n: int,
    modes: ModeBasis,
    one_body: Optional[np.ndarray] = None,
    basis: Optional[fs.FockBasis] = None,
) -> ManyBodyHamiltonian:
    """𝓗_N on F^{≤N} over ``modes``; ``one_body`` is added to the kinetic matrix."""
    if n < 1:
        raise DomainError(f"particle number must be positive, got {n}", parameter="N")
    basis = basis or fs.enumerate_basis(modes.m, n)
    if basis.modes != modes.m:
        raise DomainError(f"basis has {basis.modes} modes, mode set has {modes.m}", parameter="modes")
    h = np.diag(modes.kinetic).astype(complex)
    if one_body is not None:
        h = h + np.asarray(one_body, dtype=complex)
    tensor = pair_tensor(V, n, modes)

    matrix = (fs.d_gamma(h, basis).matrix + pair_operator(tensor, basis)).tocsr()
    defect = number_defect(matrix, basis)
    if defect > 0:
        raise ConsistencyError(f"Hamiltonian does not conserve particle number (defect {defect:.2e})")
    operator = fs.FockOperator(matrix, basis, Symmetry.HERMITIAN, label="H_N")
    logger.debug("H_N built: M=%d N=%d dim=%d nnz=%d", modes.m, n, basis.dimension, matrix.nnz)
    return ManyBodyHamiltonian(operator=operator, one_body=h, tensor=tensor, n=n, modes=modes)


# --- Evolution ---


def sector_of(psi: fs.FockVector) -> int:
    """The unique particle-number sector carrying ψ."""
    weights = psi.sector_norms() ** 2
    k = int(np.argmax(weights))
    if weights.sum() - weights[k] > 1e-20 * max(1.0, weights.sum()):
        raise DomainError("state is spread over several particle-number sectors", parameter="psi")
    return k


class SectorPropagator:
    """e^{−itH} restricted to one particle-number sector.

    Sectors up to the dense threshold are diagonalized once; larger ones
    are stepped with Krylov exponentials of width ``dt``.
    """

    def __init__(self, hamiltonian: ManyBodyHamiltonian, sector: int, dt: Optional[float] = None):
        basis = hamiltonian.basis
        self.basis = basis
        self.slice = basis.sector(sector)
        self.block = hamiltonian.operator.matrix[self.slice, self.slice].tocsr()
        self.dt = dt
        self.dense = self.block.shape[0] <= get_settings().dense_threshold
        if self.dense:
            self.values, self.vectors = np.linalg.eigh(self.block.toarray())

    def advance(self, v: np.ndarray, t: float) -> np.ndarray:
        if t == 0:
            return v.copy()
        if self.dense:
            return self.vectors @ (np.exp(-1j * t * self.values) * (self.vectors.conj().T @ v))
        steps = max(1, ceil(abs(t) / self.dt)) if self.dt else 1
        h = t / steps
        for _ in range(steps):
            v = krylov_expmv(lambda x: self.block @ x, v, -1j * h)
        return v

    def __call__(self, psi: fs.FockVector, t: float) -> fs.FockVector:
        v = self.advance(psi.coefficients[self.slice], t)
        drift = abs(np.linalg.norm(v) - np.linalg.norm(psi.coefficients))
        if drift > NORM_DRIFT_TOL:
            raise SolverError(f"norm drift {drift:.2e} during evolution to t={t}")
        logger.debug("evolved to t=%.4g, norm drift %.2e", t, drift)
        out = np.zeros(self.basis.dimension, dtype=complex)
        out[self.slice] = v
        return fs.FockVector(out, self.basis)


def evolve(psi: fs.FockVector, hamiltonian: ManyBodyHamiltonian, t: float, dt: Optional[float] = None) -> fs.FockVector:
    """e^{−itH_N}ψ for ψ supported on one sector."""
    if abs(psi.norm - 1.0) > 1e-10:
        raise DomainError(f"state has norm {psi.norm:.12g}", parameter="psi")
    if dt is not None and dt <= 0:
        raise DomainError(f"time step must be positive, got {dt}", parameter="dt")
    return SectorPropagator(hamiltonian, sector_of(psi), dt)(psi, t)


def propagate(
    psi: fs.FockVector, hamiltonian: ManyBodyHamiltonian, times: Sequence[float], dt: Optional[float] = None
) -> list[fs.FockVector]:
    """ψ_t = e^{−itH_N}ψ on a schedule, sharing one sector decomposition."""
    if abs(psi.norm - 1.0) > 1e-10:
        raise DomainError(f"state has norm {psi.norm:.12g}", parameter="psi")
    propagator = SectorPropagator(hamiltonian, sector_of(psi), dt)
    return [propagator(psi, float(t)) for t in times]


# --- Reduced densities ---


def reduced_density(psi: fs.FockVector) -> ReducedDensity:
    """γ(i;j) = ⟨ψ, a*_j a_i ψ⟩/N for ψ in the N-sector."""
    n = sector_of(psi)
    if n == 0:
        raise DomainError("the vacuum has no one-particle density", parameter="psi")
    basis = psi.basis
    lowered = np.array([basis.annihilation_mode(i) @ psi.coefficients for i in range(basis.modes)]).T
    gamma = (lowered.conj().T @ lowered).T / n
    gamma = 0.5 * (gamma + gamma.conj().T)
    values = np.linalg.eigvalsh(gamma)
    if values[0] < -DENSITY_TOL or values[-1] > 1 + DENSITY_TOL:
        raise ConsistencyError(f"reduced density eigenvalues outside [0, 1]: {values[0]:.3e}, {values[-1]:.3e}")
    return ReducedDensity(matrix=gamma, n_particles=n)


def depletion(gamma: ReducedDensity, phi: np.ndarray) -> float:
    """1 − ⟨φ, γφ⟩."""
    phi = np.asarray(phi, dtype=complex)
    if abs(np.linalg.norm(phi) - 1.0) > 1e-10:
        raise DomainError(f"condensate coefficients have norm {np.linalg.norm(phi):.12g}", parameter="phi")
    return float(1.0 - np.vdot(phi, gamma.matrix @ phi).real)


def trace_norm_distance(gamma: ReducedDensity, phi: np.ndarray) -> float:
    """‖γ − |φ⟩⟨φ|‖_tr."""
    phi = np.asarray(phi, dtype=complex)
    diff = gamma.matrix - np.outer(phi, phi.conj())
    return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


def product_state(phi: np.ndarray, basis: fs.FockBasis, n: Optional[int] = None) -> fs.FockVector:
    """φ^{⊗N} = a*(φ)^N Ω/√N!."""
    n = basis.n_max if n is None else n
    phi = np.asarray(phi, dtype=complex)
    if abs(np.linalg.norm(phi) - 1.0) > 1e-10:
        raise DomainError(f"condensate coefficients have norm {np.linalg.norm(phi):.12g}", parameter="phi")
    return fs.FockVector(fs.creation_power_state(phi, n, basis), basis)
