"""Correlation kernels k_t, η_t = q k_t q̄ and μ_t = η_t − k_t.

k_t(x;y) = −N w_ℓ(N(x−y)) φ̃_t(x) φ̃_t(y) is never tabulated as a two-point
array. Mode matrices come from one convolution per mode, and the grid-level
pointwise checks rebuild single rows k(x; ·) on demand.
"""

import logging
from typing import Optional

import numpy as np

from src.core import grids
from src.core.bogoliubov import kernel_power
from src.core.errors import ConsistencyError, DomainError
from src.core.modes import lift, project
from src.core.scattering import correlation_transform, profile_derivative, scaled_transform
from src.models.results import CorrelationKernel, GPState, ModeBasis, ScatteringSolution
from src.models.schemas import SpatialGrid

logger = logging.getLogger("gp_fluctuations")

ORTHOGONALITY_TOL = 1e-12


def _has_correlations(sol: ScatteringSolution) -> bool:
    return sol.potential is not None and not sol.potential.is_zero and bool(np.any(sol.w != 0))


def correlation_spectrum(sol: ScatteringSolution, n: int, grid: SpatialGrid) -> np.ndarray:
    """Fourier coefficients of w_ℓ(N·) at the grid wavenumbers."""
    if not _has_correlations(sol):
        return np.zeros(grids.shape(grid))
    return grids.kernel_spectrum(grid, correlation_transform(sol, n))


def correlation_profile(sol: ScatteringSolution, n: int, grid: SpatialGrid) -> np.ndarray:
    """w_ℓ(N·) as a periodic function of the displacement, FFT ordered.

    Consistent with ``grids.convolve``: Σ_y w(x−y) g(y)·h^d equals the
    spectral convolution of g.
    """
    spectrum = correlation_spectrum(sol, n, grid)
    return np.fft.ifftn(spectrum).real / grids.cell_volume(grid)


def _check_grid(state: GPState, modes: ModeBasis) -> None:
    if modes.grid is None or modes.embedding is None:
        raise DomainError("mode basis has no grid embedding", parameter="modes")
    if modes.grid != state.grid:
        raise DomainError(f"state grid {state.grid} differs from mode grid {modes.grid}", parameter="grid")


def k_matrix(phi: np.ndarray, sol: ScatteringSolution, n: int, modes: ModeBasis) -> np.ndarray:
    """K_ij = ∫∫ e_i(x) k(x;y) e_j(y) dx dy by spectral convolution."""
    grid = modes.grid
    m = modes.m
    if not _has_correlations(sol):
        return np.zeros((m, m), dtype=complex)
    spectrum = correlation_spectrum(sol, n, grid)
    weighted = modes.embedding * phi[None, ...]
    smoothed = np.array([grids.convolve(spectrum, g) for g in weighted])
    flat_w = weighted.reshape(m, -1)
    flat_s = smoothed.reshape(m, -1)
    k = -n * (flat_w @ flat_s.T) * grids.cell_volume(grid)
    return 0.5 * (k + k.T)


def kernel_matrices(c: np.ndarray, k: np.ndarray, t: float, n: int) -> CorrelationKernel:
    """η = q k q̄ and μ = η − k for unit mode coefficients c."""
    c = np.asarray(c, dtype=complex)
    q = np.eye(len(c)) - np.outer(c, c.conj())
    eta = q @ k @ q.conj()
    eta = 0.5 * (eta + eta.T)
    residual = float(np.linalg.norm(q @ eta - eta))
    if residual > ORTHOGONALITY_TOL * max(1.0, float(np.linalg.norm(eta))):
        raise ConsistencyError(f"eta is not orthogonal to the condensate (residual {residual:.2e})")
    return CorrelationKernel(t=t, n=n, k=k, eta=eta, mu=eta - k, phi=c)


def build_kernels(state: GPState, sol: ScatteringSolution, n: int, modes: ModeBasis) -> CorrelationKernel:
    """Mode-space kernels for a grid condensate.

    The condensate coefficients are normalized after projection, so η is
    exactly orthogonal to the projected mode even when φ̃ is not in the span.
    """
    _check_grid(state, modes)
    c = project(modes, state.psi)
    norm = float(np.linalg.norm(c))
    if norm == 0:
        raise DomainError("condensate has no overlap with the mode basis", parameter="phi")
    if abs(norm - 1.0) > 1e-6:
        logger.debug("condensate lies %.2e outside the mode span", 1.0 - norm)
    kernel = kernel_matrices(c / norm, k_matrix(state.psi, sol, n, modes), state.t, n)
    logger.debug("kernels at t=%.4g N=%d: ||eta||_2=%.4e", state.t, n, kernel.hs_norm)
    return kernel


def kernels_from_coefficients(
    c: np.ndarray, t: float, sol: ScatteringSolution, n: int, modes: ModeBasis
) -> CorrelationKernel:
    """Kernels for a condensate given by its mode coefficients."""
    c = np.asarray(c, dtype=complex)
    if abs(np.linalg.norm(c) - 1.0) > 1e-10:
        raise DomainError(f"condensate coefficients have norm {np.linalg.norm(c):.12g}", parameter="phi")
    phi = lift(modes, c)
    return kernel_matrices(c, k_matrix(phi, sol, n, modes), t, n)


def kernel_powers(kernel: CorrelationKernel, n: int) -> np.ndarray:
    """η^{(n)}, with ‖η^{(n)}‖₂ ≤ ‖η‖₂ⁿ enforced."""
    power = kernel_power(kernel.eta, n)
    if n == 0:
        return power
    bound = kernel.hs_norm**n
    if np.linalg.norm(power) > bound * (1 + 1e-12) + 1e-300:
        raise ConsistencyError(f"||eta^({n})||_2 = {np.linalg.norm(power):.6e} exceeds ||eta||^{n} = {bound:.6e}")
    return power


def _align_phase(psi: np.ndarray, reference: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    overlap = grids.inner(grid, reference, psi)
    if abs(overlap) == 0:
        return psi
    return psi * np.exp(-1j * np.angle(overlap))


def kernel_time_derivative(
    before: GPState,
    after: GPState,
    sol: ScatteringSolution,
    n: int,
    modes: ModeBasis,
    reference: Optional[GPState] = None,
    fix_phase: bool = False,
) -> np.ndarray:
    """Central difference (η_{t+δ} − η_{t−δ})/2δ from states at t ± δ.

    With ``fix_phase`` both states are rotated to be in phase with
    ``reference`` (default: ``before``), removing a global gauge rotation.
    """
    delta = 0.5 * (after.t - before.t)
    center = 0.5 * (after.t + before.t)
    if delta <= 0 or delta < 1e-9 * max(1.0, abs(center)):
        raise DomainError(f"stencil half-width {delta:.3g} is below the time resolution", parameter="delta")
    if fix_phase:
        ref = (reference or before).psi
        before = GPState(_align_phase(before.psi, ref, before.grid), before.grid, before.t, before.variant)
        after = GPState(_align_phase(after.psi, ref, after.grid), after.grid, after.t, after.variant)
    eta_before = build_kernels(before, sol, n, modes).eta
    eta_after = build_kernels(after, sol, n, modes).eta
    return (eta_after - eta_before) / (2 * delta)


# --- Grid-level checks ---


def _row_data(state: GPState, sol: ScatteringSolution, n: int):
    grid = state.grid
    w = correlation_profile(sol, n, grid)
    rho = np.abs(state.psi) ** 2
    big_w = grids.convolve(correlation_spectrum(sol, n, grid), rho).real
    c0 = float(grids.integrate(grid, rho * big_w))
    return w, big_w, c0


def _sample_indices(grid: SpatialGrid, samples: int):
    stride = max(1, grid.points // samples)
    axes = [np.arange(0, grid.points, stride)] * grid.dimension
    mesh = np.meshgrid(*axes, indexing="ij")
    return [tuple(int(m.flat[i]) for m in mesh) for i in range(mesh[0].size)], stride


def eta_row(state: GPState, sol: ScatteringSolution, n: int, x_index: tuple, data=None) -> np.ndarray:
    """η(x; ·) on the full grid, from η = −Nφ(x)φ(y)[w_N(x−y) − W(x) − W(y) + ⟨ρ, W⟩], W = w_N ∗ ρ."""
    w, big_w, c0 = data or _row_data(state, sol, n)
    axes = tuple(range(state.grid.dimension))
    shifted = np.roll(w, x_index, axis=axes)
    phi = state.psi
    return -n * phi[x_index] * phi * (shifted - big_w[x_index] - big_w + c0)


def _floor_mask(phi: np.ndarray, floor: float) -> np.ndarray:
    amp = np.abs(phi)
    return amp >= floor * float(np.max(amp))


def pointwise_constant(state: GPState, sol: ScatteringSolution, n: int, samples: int = 32, floor: float = 1e-3) -> float:
    """Empirical sup of |η(x;y)|·(|x−y| + 1/N)/(|φ(x)||φ(y)|) on a subsampled lattice."""
    grid = state.grid
    if not _has_correlations(sol):
        return 0.0
    data = _row_data(state, sol, n)
    dist = grids.displacement_radius(grid)
    axes = tuple(range(grid.dimension))
    indices, stride = _sample_indices(grid, samples)
    keep = _floor_mask(state.psi, floor)
    amp = np.abs(state.psi)
    grid_shape = grids.shape(grid)
    sub = tuple(slice(None, None, stride) for _ in axes)
    worst = 0.0
    for x in indices:
        if not keep[x]:
            continue
        row = eta_row(state, sol, n, x, data)
        d = np.roll(dist, x, axis=axes)
        ratio = np.divide(np.abs(row) * (d + 1.0 / n), amp[x] * amp, out=np.zeros(grid_shape), where=keep)
        worst = max(worst, float(np.max(ratio[sub])))
    return worst


def square_pointwise_constant(
    state: GPState, sol: ScatteringSolution, n: int, samples: int = 16, floor: float = 1e-3
) -> float:
    """Empirical sup of |η^{(2)}(x;y)|/(|φ(x)||φ(y)|) with η^{(2)} = η η̄."""
    grid = state.grid
    if not _has_correlations(sol):
        return 0.0
    data = _row_data(state, sol, n)
    _, big_w, c0 = data
    spectrum = correlation_spectrum(sol, n, grid)
    indices, stride = _sample_indices(grid, samples)
    keep = _floor_mask(state.psi, floor)
    amp = np.abs(state.psi)
    grid_shape = grids.shape(grid)
    phi_bar = state.psi.conj()
    sub = tuple(slice(None, None, stride) for _ in range(grid.dimension))
    worst = 0.0
    for x in indices:
        if not keep[x]:
            continue
        u = eta_row(state, sol, n, x, data) * phi_bar
        total = grids.integrate(grid, u)
        weighted = grids.integrate(grid, u * big_w)
        row = -n * phi_bar * (grids.convolve(spectrum, u) - weighted - big_w * total + c0 * total)
        ratio = np.divide(np.abs(row), amp[x] * amp, out=np.zeros(grid_shape), where=keep)
        worst = max(worst, float(np.max(ratio[sub])))
    return worst


def gradient_norm(state: GPState, sol: ScatteringSolution, n: int) -> float:
    """‖∇_x k‖₂ over both variables.

    With F₁ = |∇(w_ℓ(N·))|² and F₂ = w_ℓ(N·)²,
    ‖∇₁k‖² = N²[⟨ρ, F₁∗ρ⟩ + ⟨|∇φ|², F₂∗ρ⟩ − ½⟨Δρ, F₂∗ρ⟩].
    """
    grid = state.grid
    if not _has_correlations(sol):
        return 0.0
    r = sol.radii
    dw = -profile_derivative(sol)
    f1 = grids.kernel_spectrum(grid, scaled_transform(r, dw**2, n, 1.0 / n))
    f2 = grids.kernel_spectrum(grid, scaled_transform(r, sol.w**2, n, 1.0 / n**3))
    rho = np.abs(state.psi) ** 2
    grad_sq = sum(np.abs(g) ** 2 for g in grids.gradient(grid, state.psi))
    f2_rho = grids.convolve(f2, rho).real
    total = (
        grids.integrate(grid, rho * grids.convolve(f1, rho).real)
        + grids.integrate(grid, grad_sq * f2_rho)
        - 0.5 * grids.integrate(grid, grids.laplacian(grid, rho).real * f2_rho)
    )
    return float(n * np.sqrt(max(float(np.real(total)), 0.0)))
