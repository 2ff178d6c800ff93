"""Result dataclasses produced by the numerical core.

These are internal types consumed by formatters, the CLI writers and the
checks. Lightweight dataclasses rather than Pydantic models since they hold
numpy arrays and need no validation.
"""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from src.models.schemas import SpatialGrid, Variant


# --- Scattering ---


@dataclass(frozen=True, eq=False)
class ScatteringSolution:
    """Radial profile u = r·f on a grid covering [0, r_end].

    ``lambda_ell`` is None for the zero-energy problem. For the Neumann
    problem ``f`` is normalized to 1 at the box radius N·ell and the
    profile is continued by 1 outside the box.
    """
    radii: np.ndarray
    u: np.ndarray
    du: np.ndarray
    f: np.ndarray
    a0: float
    slope: float
    support_radius: float
    fit_residual: float = 0.0
    lambda_ell: Optional[float] = None
    n: Optional[int] = None
    ell: Optional[float] = None
    potential: Any = field(default=None, compare=False, repr=False)

    @property
    def w(self) -> np.ndarray:
        return 1.0 - self.f

    @property
    def is_neumann(self) -> bool:
        return self.lambda_ell is not None

    @property
    def box_radius(self) -> float:
        return float(self.radii[-1])


@dataclass
class RescaledProfiles:
    """f_ℓ(N·), w_ℓ(N·) and N²V(N·)f_ℓ(N·) sampled on a spatial grid."""
    n: int
    f: np.ndarray
    w: np.ndarray
    vf: np.ndarray
    residual: float
    rescaled_integral: float
    unscaled_integral: float


@dataclass(frozen=True, eq=False)
class ConvolutionKernel:
    """Continuum Fourier coefficients of a radial kernel at the grid wavenumbers."""
    spectrum: np.ndarray
    label: str = ""


# --- GP dynamics ---


@dataclass(frozen=True, eq=False)
class GPState:
    psi: np.ndarray
    grid: SpatialGrid
    t: float = 0.0
    variant: Variant = Variant.GP
    a0: float = 0.0
    kernel: Optional[ConvolutionKernel] = None
    v_ext: Optional[np.ndarray] = None


@dataclass
class GalerkinTrajectory:
    """Mode coefficients of a Galerkin-projected modified GP flow."""
    times: np.ndarray
    coefficients: np.ndarray  # shape (len(times), M)
    interpolant: Any = None   # dense-output callable t -> c(t)

    def at(self, t: float) -> np.ndarray:
        if self.interpolant is None:
            idx = int(np.argmin(np.abs(self.times - t)))
            return self.coefficients[idx]
        return np.asarray(self.interpolant(t))


# --- Modes ---


@dataclass
class ModeBasis:
    """Orthonormal one-particle modes on a periodic box.

    ``transform`` expresses every mode in the plane waves listed in
    ``momenta``: e_j = Σ_a transform[j, a]·exp(i k_a·x)/sqrt(L^d).
    """
    labels: list[str]
    momenta: np.ndarray        # (P, d) plane-wave wavevectors
    transform: np.ndarray      # (M, P)
    kinetic: np.ndarray        # (M,) |k|² of every mode
    length: float
    dimension: int
    embedding: Optional[np.ndarray] = None  # (M, *grid shape)
    grid: Optional[SpatialGrid] = None

    @property
    def m(self) -> int:
        return len(self.labels)


# --- Checks and experiments ---


@dataclass
class CheckResult:
    """Outcome of a single identity or inequality check."""
    name: str
    passed: bool
    residual: float
    threshold: float
    detail: str = ""


@dataclass
class ExperimentRecord:
    """Named scalar series with run metadata."""
    name: str
    series: dict[str, list[float]] = field(default_factory=dict)
    scalars: dict[str, float] = field(default_factory=dict)
    metadata: dict[str, Any] = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)


# --- Bogoliubov ---


@dataclass
class HyperbolicPair:
    eta: np.ndarray
    cosh: np.ndarray
    sinh: np.ndarray
    terms: int

    @property
    def p(self) -> np.ndarray:
        return self.cosh - np.eye(self.cosh.shape[0])

    @property
    def r(self) -> np.ndarray:
        return self.sinh - self.eta


@dataclass
class SeriesResult:
    operator: Any
    residual: float
    residuals: list[float] = field(default_factory=list)
    diverging: bool = False


# --- Correlations ---


@dataclass
class CorrelationKernel:
    """Mode-space k_t, η_t = q k q̄, μ_t = η_t − k_t at time ``t``.

    The grid-level kernel −N·w_ℓ(N(x−y))·φ̃(x)φ̃(y) is never stored; it is
    rebuilt from ``phi`` and the scattering profile when needed.
    """
    t: float
    n: int
    k: np.ndarray
    eta: np.ndarray
    mu: np.ndarray
    phi: np.ndarray  # condensate mode coefficients

    @property
    def hs_norm(self) -> float:
        return float(np.linalg.norm(self.eta))


# --- Many-body ---


@dataclass(eq=False)
class ManyBodyHamiltonian:
    """𝓗 = dΓ(h) + ½Σ T_{pqrs} a*_p a*_q a_s a_r on F^{≤N} over a mode basis."""
    operator: Any            # FockOperator
    one_body: np.ndarray     # (M, M)
    tensor: np.ndarray       # (M, M, M, M)
    n: int
    modes: ModeBasis

    @property
    def basis(self):
        return self.operator.basis


@dataclass(eq=False)
class CondensateFlow:
    """Mode coefficients c(t) of a projected (modified) GP flow on both sides of t = 0."""
    forward: GalerkinTrajectory
    backward: Optional[GalerkinTrajectory]
    vector_field: Any        # (t, c) -> dc/dt
    label: str = ""

    def at(self, t: float) -> np.ndarray:
        part = self.backward if t < 0 and self.backward is not None else self.forward
        c = part.at(t)
        return c / np.linalg.norm(c)

    def derivative(self, t: float) -> np.ndarray:
        return np.asarray(self.vector_field(t, self.at(t)))


@dataclass(eq=False)
class FluctuationInputs:
    """Everything the fluctuation dynamics needs at one particle number."""
    n: int
    modes: ModeBasis
    potential: Any           # RadialPotential
    scattering: ScatteringSolution
    hamiltonian: ManyBodyHamiltonian
    flow: CondensateFlow
    flow_tensor: np.ndarray
    delta: float = 0.0

    @property
    def basis(self):
        return self.hamiltonian.basis


@dataclass
class ReducedDensity:
    matrix: np.ndarray
    n_particles: int

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass
class GeneratorBundle:
    """Generator of the fluctuation dynamics compressed to F^{≤N}_{⊥φ̃_t}.

    All matrices are expressed in the excitation basis of ``isometry``
    (columns span F^{≤N}_{⊥φ̃_t}).
    """
    t: float
    n: int
    generator: np.ndarray
    hermiticity_defect: float
    c_nt: float
    components: dict[int, np.ndarray]
    decomposition_residual: float
    number: np.ndarray
    hamiltonian: np.ndarray
    delta: float


@dataclass
class FormBounds:
    t: float
    n: int
    c_lo: float
    c_hi: float
    c_comm: float


@dataclass
class Trajectory:
    times: list[float]
    number: list[float]
    energy: list[float]
    norms: list[float]
    unitarity_defect: float
    states: list[Any] = field(default_factory=list)
    envelope: dict[str, float] = field(default_factory=dict)
    reference_weight: Optional[float] = None


# --- Runs ---


@dataclass
class RunManifest:
    scenario: str
    config: dict[str, Any]
    version: str
    seed: int
    started: str
    finished: str = ""
    wall_time: float = 0.0
    checks: list[CheckResult] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)
