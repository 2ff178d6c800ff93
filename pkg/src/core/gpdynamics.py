"""Time-dependent GP and modified GP equations on a periodic grid.

Both flows use Strang splitting: half a kinetic step in Fourier space, a
full nonlinear phase in position space, another half kinetic step. Every
substep is unitary, so the mass is conserved up to rounding and a step
with −dt undoes a step with dt.

In the quasi one-dimensional analog (``grid.dimension == 1``) the coupling
8πa₀ becomes 8πa₀/A, matching the transverse average applied to the
modified-GP kernel in ``grids.kernel_spectrum``.
"""

import logging
from dataclasses import replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from src.core import grids
from src.core.errors import ConvergenceError, DomainError, IntegrationError, NumericFailure
from src.core.potentials import RadialPotential
from src.core.scattering import interaction_kernel, solve_neumann, solve_zero_energy
from src.models.results import ConvolutionKernel, ExperimentRecord, GalerkinTrajectory, GPState
from src.models.schemas import SpatialGrid, TrapPreset, Variant

logger = logging.getLogger("gp_fluctuations")

# relative slack before an energy increase counts against the ground-state flow
_ENERGY_NOISE = 1e-13
_MAX_INCREASES = 100


def coupling(a0: float, grid: SpatialGrid) -> float:
    """Contact coupling 8πa₀ (3D) or 8πa₀/A (quasi-1D)."""
    g = 8 * np.pi * a0
    return g / grid.transverse_area if grid.dimension == 1 else g


def external_potential(grid: SpatialGrid, trap: TrapPreset, strength: float = 1.0) -> np.ndarray:
    r = grids.radius(grid)
    if trap == TrapPreset.HARMONIC:
        return strength * r**2
    if trap == TrapPreset.QUARTIC:
        return strength * r**4
    return np.zeros_like(r)


def gaussian_packet(
    grid: SpatialGrid, width: float = 1.0, momentum: float = 0.0, center: float = 0.0
) -> np.ndarray:
    """Normalized Gaussian exp(−|x−x₀|²/2w²)·e^{ipx₁}."""
    coords = grids.coordinates(grid)
    r2 = (coords[0] - center) ** 2 + sum(c**2 for c in coords[1:])
    psi = np.exp(-r2 / (2 * width**2)) * np.exp(1j * momentum * coords[0])
    return grids.normalize(grid, psi.astype(complex))


def initial_state(
    psi: np.ndarray,
    grid: SpatialGrid,
    a0: float = 0.0,
    variant: Variant = Variant.GP,
    kernel: Optional[ConvolutionKernel] = None,
    v_ext: Optional[np.ndarray] = None,
) -> GPState:
    if psi.shape != grids.shape(grid):
        raise DomainError(f"field shape {psi.shape} does not match grid {grids.shape(grid)}", parameter="psi")
    return GPState(
        psi=grids.normalize(grid, np.asarray(psi, dtype=complex)), grid=grid, t=0.0,
        variant=variant, a0=a0, kernel=kernel, v_ext=v_ext,
    )


@lru_cache(maxsize=32)
def _half_kinetic(grid: SpatialGrid, dt: float) -> np.ndarray:
    return np.exp(-0.5j * dt * grids.k_squared(grid))


def _check_dt(dt: float) -> None:
    if not np.isfinite(dt) or dt == 0:
        raise DomainError(f"time step must be finite and nonzero, got {dt}", parameter="dt")


def _split_step(state: GPState, dt: float, potential: Callable[[np.ndarray], np.ndarray]) -> GPState:
    half = _half_kinetic(state.grid, dt)
    psi = np.fft.ifftn(half * np.fft.fftn(state.psi))
    phase = potential(np.abs(psi) ** 2)
    if state.v_ext is not None:
        phase = phase + state.v_ext
    psi = psi * np.exp(-1j * dt * phase)
    psi = np.fft.ifftn(half * np.fft.fftn(psi))
    t = state.t + dt
    if not np.all(np.isfinite(psi)):
        raise NumericFailure("non-finite wave function", t=t)
    return replace(state, psi=psi, t=t)


def gp_step(state: GPState, dt: float) -> GPState:
    """One Strang step of i∂ₜφ = −Δφ + 8πa₀|φ|²φ (+ V_ext φ). ``dt`` may be negative."""
    if state.variant != Variant.GP:
        raise DomainError(f"gp_step needs a gp state, got {state.variant.value}", parameter="variant")
    _check_dt(dt)
    g = coupling(state.a0, state.grid)
    return _split_step(state, dt, lambda rho: g * rho)


def modified_gp_step(state: GPState, dt: float, kernel: Optional[ConvolutionKernel] = None) -> GPState:
    """One Strang step of i∂ₜφ̃ = −Δφ̃ + (K ∗ |φ̃|²)φ̃ with K = N³V(N·)f_ℓ(N·)."""
    _check_dt(dt)
    kernel = kernel or state.kernel
    if kernel is None:
        raise DomainError("modified GP step needs a convolution kernel", parameter="kernel")
    if kernel.spectrum.shape != state.psi.shape:
        raise DomainError(
            f"kernel shape {kernel.spectrum.shape} does not match grid {state.psi.shape}", parameter="kernel"
        )
    new = _split_step(state, dt, lambda rho: grids.convolve(kernel.spectrum, rho).real)
    return replace(new, variant=Variant.MODIFIED_GP, kernel=kernel)


def step(state: GPState, dt: float) -> GPState:
    if state.variant == Variant.MODIFIED_GP:
        return modified_gp_step(state, dt)
    return gp_step(state, dt)


def gp_energy(state: GPState) -> float:
    """Conserved functional of the state's flow.

    gp: ∫|∇φ|² + 4πa₀∫|φ|⁴ + ∫V_ext|φ|²;
    modified-gp: ∫|∇φ̃|² + ½∫(K∗|φ̃|²)|φ̃|² + ∫V_ext|φ̃|².
    """
    grid = state.grid
    rho = np.abs(state.psi) ** 2
    energy = grids.kinetic_energy(grid, state.psi)
    if state.variant == Variant.MODIFIED_GP:
        if state.kernel is not None:
            energy += 0.5 * float(grids.integrate(grid, grids.convolve(state.kernel.spectrum, rho).real * rho))
    else:
        energy += 0.5 * coupling(state.a0, grid) * float(grids.integrate(grid, rho**2))
    if state.v_ext is not None:
        energy += float(grids.integrate(grid, state.v_ext * rho))
    return float(energy)


def mass(state: GPState) -> float:
    return grids.norm(state.grid, state.psi)


def _hamiltonian_action(psi: np.ndarray, grid: SpatialGrid, g: float, v_ext: np.ndarray) -> np.ndarray:
    return -grids.laplacian(grid, psi) + (g * np.abs(psi) ** 2 + v_ext) * psi


def gp_ground_state(
    v_ext: np.ndarray,
    a0: float,
    grid: SpatialGrid,
    tol: float = 1e-10,
    max_steps: int = 50_000,
    step_size: float = 0.8,
) -> GPState:
    """Minimize the trapped GP functional by a preconditioned normalized gradient flow.

    Stops when the energy decrease per step is below ``tol`` and the
    Euler-Lagrange residual ‖(H − μ)φ‖ is at most 10·tol.
    """
    v_ext = np.asarray(v_ext, dtype=float)
    if v_ext.shape != grids.shape(grid):
        raise DomainError(f"V_ext shape {v_ext.shape} does not match grid", parameter="v_ext")
    if not np.all(np.isfinite(v_ext)):
        raise DomainError("V_ext must be finite on the grid", parameter="v_ext")

    g = coupling(a0, grid)
    k2 = grids.k_squared(grid)
    psi = grids.normalize(grid, np.exp(-0.5 * (v_ext - v_ext.min())).astype(complex))
    state = GPState(psi=psi, grid=grid, a0=a0, v_ext=v_ext)
    energy = gp_energy(state)
    increases = 0

    for iteration in range(1, max_steps + 1):
        h_psi = _hamiltonian_action(psi, grid, g, v_ext)
        mu = grids.inner(grid, psi, h_psi).real
        residual = h_psi - mu * psi
        alpha = 1.0 + float(v_ext.max()) + g * float(np.max(np.abs(psi) ** 2))
        psi = grids.normalize(grid, psi - step_size * np.fft.ifftn(np.fft.fftn(residual) / (alpha + k2)))
        state = replace(state, psi=psi)
        new_energy = gp_energy(state)

        if new_energy > energy + _ENERGY_NOISE * max(1.0, abs(energy)):
            increases += 1
            if increases >= _MAX_INCREASES:
                raise ConvergenceError("GP energy kept increasing", iterations=iteration)
        else:
            increases = 0
        drop = energy - new_energy
        energy = new_energy
        if abs(drop) < tol and grids.norm(grid, residual) <= 10 * tol:
            logger.debug("ground state converged: %d steps, E=%.12g, mu=%.12g", iteration, energy, mu)
            break
    else:
        raise ConvergenceError(f"ground state tolerance {tol:g} not reached", iterations=max_steps)

    peak = psi.flat[np.argmax(np.abs(psi))]
    psi = psi * np.exp(-1j * np.angle(peak))
    return replace(state, psi=psi)


def euler_lagrange_residual(state: GPState) -> float:
    """‖(−Δ + V_ext + 8πa₀|φ|² − μ)φ‖ with μ = ⟨φ, Hφ⟩."""
    v_ext = state.v_ext if state.v_ext is not None else np.zeros(state.psi.shape)
    h_psi = _hamiltonian_action(state.psi, state.grid, coupling(state.a0, state.grid), v_ext)
    mu = grids.inner(state.grid, state.psi, h_psi).real
    return grids.norm(state.grid, h_psi - mu * state.psi)


def _step_count(t_final: float, dt: float) -> tuple[int, float]:
    n_steps = max(1, int(round(abs(t_final) / abs(dt))))
    return n_steps, t_final / n_steps


def evolve(state: GPState, t_final: float, dt: float, record_every: int = 1) -> tuple[GPState, ExperimentRecord]:
    """Propagate to ``state.t + t_final`` and record (t, mass, energy)."""
    _check_dt(dt)
    n_steps, dt = _step_count(t_final, dt)
    record = ExperimentRecord(name=f"{state.variant.value}-evolution", series={"t": [], "mass": [], "energy": []})

    def observe(s: GPState) -> None:
        record.series["t"].append(s.t)
        record.series["mass"].append(mass(s))
        record.series["energy"].append(gp_energy(s))

    observe(state)
    for i in range(1, n_steps + 1):
        state = step(state, dt)
        if i % record_every == 0 or i == n_steps:
            observe(state)
    energies = np.asarray(record.series["energy"])
    record.scalars["energy_drift"] = float(np.max(np.abs(energies - energies[0])))
    record.scalars["mass_drift"] = float(np.max(np.abs(np.asarray(record.series["mass"]) - 1.0)))
    return state, record


def time_derivative_norm(state: GPState, h: float = 1e-4) -> float:
    """‖∂ₜφ‖ by a central difference over ±h."""
    forward = step(state, h)
    backward = step(state, -h)
    return grids.norm(state.grid, (forward.psi - backward.psi) / (2 * h))


def neumann_kernels(
    potential: RadialPotential, n_values: list[int], ell: float, grid: SpatialGrid, grid_points: int = 2048
) -> dict[int, ConvolutionKernel]:
    """N³V(N·)f_ℓ(N·) spectra on ``grid`` for every N."""
    return {
        n: interaction_kernel(solve_neumann(potential, n, ell, grid_points), n, grid)
        for n in n_values
    }


def compare_dynamics(
    phi0: GPState,
    n_values: list[int],
    t_final: float,
    dt: float = 1e-3,
    potential: Optional[RadialPotential] = None,
    ell: float = 0.5,
    kernels: Optional[dict[int, ConvolutionKernel]] = None,
    grid_points: int = 2048,
) -> ExperimentRecord:
    """sup_{t≤T}‖φₜ − φ̃ₜ‖ for each N, with the fitted log-log slope.

    ``phi0.a0`` drives the GP flow unless ``potential`` is given, in which
    case a₀ comes from its zero-energy scattering solution. Kernels for the
    modified flow are built from the Neumann problem unless supplied.
    """
    if kernels is None:
        if potential is None:
            raise DomainError("either a potential or explicit kernels are required", parameter="potential")
        kernels = neumann_kernels(potential, n_values, ell, phi0.grid, grid_points)
    a0 = solve_zero_energy(potential).a0 if potential is not None else phi0.a0
    n_steps, dt = _step_count(t_final, dt)

    record = ExperimentRecord(
        name="compare-dynamics",
        series={"n": [], "sup_difference": [], "final_difference": []},
        metadata={"t_final": t_final, "dt": dt, "a0": a0},
    )
    for n in n_values:
        gp = replace(phi0, variant=Variant.GP, a0=a0, kernel=None, t=0.0)
        mod = replace(phi0, variant=Variant.MODIFIED_GP, kernel=kernels[n], t=0.0)
        sup_diff = grids.norm(phi0.grid, gp.psi - mod.psi)
        for _ in range(n_steps):
            gp = gp_step(gp, dt)
            mod = modified_gp_step(mod, dt)
            sup_diff = max(sup_diff, grids.norm(phi0.grid, gp.psi - mod.psi))
        final = grids.norm(phi0.grid, gp.psi - mod.psi)
        record.series["n"].append(float(n))
        record.series["sup_difference"].append(sup_diff)
        record.series["final_difference"].append(final)
        logger.info("compare-dynamics N=%d: sup difference %.6e", n, sup_diff)

    diffs = np.asarray(record.series["sup_difference"])
    if len(n_values) >= 2 and np.all(diffs > 0):
        slope, _ = np.polyfit(np.log(record.series["n"]), np.log(diffs), 1)
        record.scalars["slope"] = float(slope)
    return record


def galerkin_rhs(kinetic: np.ndarray, tensor: np.ndarray) -> Callable[[float, np.ndarray], np.ndarray]:
    """−i(h c + Σ T_{pqrs} c̄_q c_r c_s), the projected modified GP vector field."""
    h = np.diag(kinetic) if kinetic.ndim == 1 else kinetic

    def rhs(_t, c):
        return -1j * (h @ c + np.einsum("pqrs,q,r,s->p", tensor, c.conj(), c, c, optimize=True))

    return rhs


def galerkin_modified_gp(
    c0: np.ndarray, kinetic: np.ndarray, tensor: np.ndarray, times: np.ndarray
) -> GalerkinTrajectory:
    """Integrate the modified GP equation projected onto a finite mode basis."""
    times = np.asarray(times, dtype=float)
    c0 = np.asarray(c0, dtype=complex)
    if abs(np.linalg.norm(c0) - 1) > 1e-12:
        raise DomainError(f"initial coefficients have norm {np.linalg.norm(c0):.12g}", parameter="c0")
    if times[0] == times[-1]:
        return GalerkinTrajectory(times=times, coefficients=np.tile(c0, (len(times), 1)))
    sol = solve_ivp(
        galerkin_rhs(kinetic, tensor), (times[0], times[-1]), c0, method="DOP853",
        t_eval=times, rtol=1e-12, atol=1e-13, dense_output=True,
    )
    if not sol.success:
        raise IntegrationError(f"Galerkin modified GP integration failed: {sol.message}")
    return GalerkinTrajectory(times=times, coefficients=sol.y.T, interpolant=sol.sol)
