"""Zero-energy and Neumann scattering problems for radial potentials.

Everything works with the reduced radial function u(r) = r·f(r), which turns
(−Δ + ½V) f = λ f into the two-point problem u'' = (½V − λ) u, u(0) = 0.
Outside the support of V the solution is known in closed form, so the ODE
is only integrated on [0, R_V].
"""

import logging
from typing import Callable

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.optimize import brentq

from src.core import grids
from src.core.errors import ConsistencyError, DomainError, IntegrationError, SolverError
from src.core.potentials import RadialPotential, scaled_fourier
from src.models.results import ConvolutionKernel, RescaledProfiles, ScatteringSolution
from src.models.schemas import SpatialGrid

logger = logging.getLogger("gp_fluctuations")

RTOL = 1e-10
ATOL = 1e-12
MIN_GRID_POINTS = 512
# first positive root of tan(x) = x: the lowest nonzero free Neumann level is this squared over R²
FIRST_NEUMANN_ROOT = 4.493409457909064


def _radial_nodes(support: float, r_end: float, grid_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes on [0, R_V] and (R_V, r_end]; R_V is always a node."""
    n_in = grid_points // 2 + 1
    n_out = grid_points - n_in + 1
    inner = np.linspace(0.0, support, n_in)
    outer = np.linspace(support, r_end, n_out)[1:]
    return inner, outer


def _integrate_inside(
    V: RadialPotential, lam: float, support: float, nodes: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    def rhs(r, y):
        return [y[1], (0.5 * float(V(r)) - lam) * y[0]]

    sol = solve_ivp(
        rhs, (0.0, support), [0.0, 1.0], method="RK45", t_eval=nodes,
        rtol=RTOL, atol=ATOL, max_step=support / 64,
    )
    if not sol.success:
        raise IntegrationError(f"radial integration failed at lambda={lam:.6g}: {sol.message}")
    return sol.y[0], sol.y[1]


def _free_continuation(u_edge: float, du_edge: float, lam: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solution of u'' = −λu continued from (u, u') at distance x beyond the support."""
    k = np.sqrt(lam)
    # sin(kx)/k written through sinc so that λ = 0 gives the straight line
    sin_over_k = x * np.sinc(k * x / np.pi)
    u = u_edge * np.cos(k * x) + du_edge * sin_over_k
    du = -u_edge * k * np.sin(k * x) + du_edge * np.cos(k * x)
    return u, du


def _profile_from_u(radii: np.ndarray, u: np.ndarray, du: np.ndarray) -> np.ndarray:
    f = np.empty_like(u)
    f[1:] = u[1:] / radii[1:]
    f[0] = du[0]  # lim u/r = u'(0)
    return f


def solve_zero_energy(
    V: RadialPotential, r_max: float | None = None, grid_points: int = 2048
) -> ScatteringSolution:
    """Solve −u'' + ½Vu = 0 and read off the scattering length from the asymptote."""
    if grid_points < MIN_GRID_POINTS:
        raise DomainError(f"grid_points must be at least {MIN_GRID_POINTS}", parameter="grid_points")
    support = V.support_radius
    if r_max is None:
        r_max = 10.0 * support if support > 0 else 10.0
    if r_max <= support:
        raise DomainError(f"r_max={r_max} must exceed the support radius {support}", parameter="r_max")

    if V.is_zero:
        radii = np.linspace(0.0, r_max, grid_points)
        ones = np.ones_like(radii)
        return ScatteringSolution(
            radii=radii, u=radii.copy(), du=ones, f=ones.copy(), a0=0.0, slope=1.0,
            support_radius=0.0, potential=V,
        )

    inner, outer = _radial_nodes(support, r_max, grid_points)
    u_in, du_in = _integrate_inside(V, 0.0, support, inner)
    u_out, du_out = _free_continuation(u_in[-1], du_in[-1], 0.0, outer - support)
    radii = np.concatenate([inner, outer])
    u = np.concatenate([u_in, u_out])
    du = np.concatenate([du_in, du_out])

    tail = radii >= r_max - 0.1 * (r_max - support)
    slope, intercept = np.polyfit(radii[tail], u[tail], 1)
    fit_residual = float(np.sqrt(np.mean((u[tail] - slope * radii[tail] - intercept) ** 2)))
    a0 = -intercept / slope
    u, du = u / slope, du / slope
    logger.debug("zero-energy solve: a0=%.12g slope=%.6g fit_rms=%.2e", a0, slope, fit_residual)

    return ScatteringSolution(
        radii=radii, u=u, du=du, f=_profile_from_u(radii, u, du), a0=float(a0),
        slope=float(slope), support_radius=support, fit_residual=fit_residual, potential=V,
    )


def scattering_length_integral(V: RadialPotential, sol: ScatteringSolution) -> float:
    """(1/8π)∫V f = ½∫₀^{R_V} r² V(r) f(r) dr."""
    if V.is_zero:
        return 0.0
    support = V.support_radius
    if sol.radii[-1] < support * (1 - 1e-12):
        raise DomainError(
            f"profile grid ends at {sol.radii[-1]:.6g}, inside the support {support:.6g}",
            parameter="f",
        )
    mask = sol.radii <= support * (1 + 1e-12)
    r = sol.radii[mask]
    return float(0.5 * simpson(r**2 * V(r) * sol.f[mask], x=r))


def solve_neumann(V: RadialPotential, n: int, ell: float, grid_points: int = 2048) -> ScatteringSolution:
    """Lowest Neumann eigenpair of −Δ + ½V on the ball of radius N·ell.

    The eigenvalue is found by shooting on λ: F(λ) = R·u'(R) − u(R) is
    positive at λ = 0 and changes sign at λ_ℓ ≈ 3a0/R³, well below the first
    free Neumann level.
    """
    if grid_points < MIN_GRID_POINTS:
        raise DomainError(f"grid_points must be at least {MIN_GRID_POINTS}", parameter="grid_points")
    box = n * ell
    support = V.support_radius
    if box <= support:
        raise DomainError(f"N*ell={box:.6g} must exceed the support radius {support:.6g}", parameter="ell")

    if V.is_zero:
        radii = np.linspace(0.0, box, grid_points)
        ones = np.ones_like(radii)
        return ScatteringSolution(
            radii=radii, u=radii.copy(), du=ones, f=ones.copy(), a0=0.0, slope=1.0,
            support_radius=0.0, lambda_ell=0.0, n=n, ell=ell, potential=V,
        )

    u0, du0 = _integrate_inside(V, 0.0, support)
    a0 = support - u0[-1] / du0[-1]
    if a0 <= 0:
        raise ConsistencyError(f"nonpositive scattering length {a0:.6g} for a nonnegative potential")

    def shoot(lam: float) -> float:
        u_edge, du_edge = _integrate_inside(V, lam, support)
        u, du = _free_continuation(u_edge[-1], du_edge[-1], lam, np.array([box - support]))
        return float(box * du[0] - u[0])

    guess = 3 * a0 / box**3
    ceiling = FIRST_NEUMANN_ROOT**2 / box**2
    lo, hi = 0.0, guess / 8
    while shoot(hi) > 0:
        lo, hi = hi, 2 * hi
        if hi > ceiling:
            raise SolverError(f"no sign change of the Neumann shooting function below {ceiling:.3g}")
    lam = brentq(shoot, lo, hi, xtol=guess * 1e-15, rtol=1e-12)
    if lam < 0:
        raise ConsistencyError(f"negative Neumann eigenvalue {lam:.3g}")

    inner, outer = _radial_nodes(support, box, grid_points)
    u_in, du_in = _integrate_inside(V, lam, support, inner)
    u_out, du_out = _free_continuation(u_in[-1], du_in[-1], lam, outer - support)
    radii = np.concatenate([inner, outer])
    u = np.concatenate([u_in, u_out])
    du = np.concatenate([du_in, du_out])
    scale = u[-1] / box
    u, du = u / scale, du / scale
    logger.debug("Neumann solve: N=%d ell=%.4g lambda=%.12g (3a0/R^3=%.12g)", n, ell, lam, guess)

    return ScatteringSolution(
        radii=radii, u=u, du=du, f=_profile_from_u(radii, u, du), a0=float(a0),
        slope=float(scale), support_radius=support, lambda_ell=float(lam), n=n, ell=ell,
        potential=V,
    )


def evaluate_profile(sol: ScatteringSolution, r: np.ndarray) -> np.ndarray:
    """f at arbitrary radii; 1 outside a Neumann box, 1 − a0/r beyond a zero-energy grid."""
    r = np.asarray(r, dtype=float)
    inside = np.interp(r, sol.radii, sol.f)
    if sol.is_neumann:
        outside = np.ones_like(r)
    else:
        outside = 1.0 - sol.a0 / np.maximum(r, sol.box_radius)
    return np.where(r <= sol.box_radius, inside, outside)


def profile_derivative(sol: ScatteringSolution) -> np.ndarray:
    """f'(r) = (r·u' − u)/r² on the solution grid (zero at the origin)."""
    r = sol.radii
    df = np.zeros_like(r)
    df[1:] = (r[1:] * sol.du[1:] - sol.u[1:]) / r[1:] ** 2
    return df


def decay_constants(sol: ScatteringSolution) -> tuple[float, float]:
    """Smallest C with w(r) ≤ C/(r+1) and |w'(r)| ≤ C/(r²+1) on the grid."""
    r = sol.radii
    c_w = float(np.max(sol.w * (r + 1)))
    c_grad = float(np.max(np.abs(profile_derivative(sol)) * (r**2 + 1)))
    return c_w, c_grad


def profile_discrepancy(neumann: ScatteringSolution, zero_energy: ScatteringSolution) -> float:
    """sup |f_ℓ − f| over the support of V."""
    mask = neumann.radii <= neumann.support_radius
    r = neumann.radii[mask]
    return float(np.max(np.abs(neumann.f[mask] - evaluate_profile(zero_energy, r))))


def rescaled_profiles(sol: ScatteringSolution, n: int, grid: SpatialGrid) -> RescaledProfiles:
    """Tabulate f(N|x|), w(N|x|), N²V(N|x|)f(N|x|) on a spatial grid.

    The residual is the relative discrete L² distance between ρ·f(Nρ) and an
    independent integration of the rescaled equation
    G'' = (½N²V(Nρ) − N²λ)G, G(0) = 0, G'(0) = f(0).
    """
    V = sol.potential
    r_grid = grids.radius(grid)
    f_vals = evaluate_profile(sol, n * r_grid)
    vf = n**2 * V(n * r_grid) * f_vals

    lam = sol.lambda_ell or 0.0
    rho = sol.radii / n
    target = rho * sol.f
    max_step = (sol.support_radius or sol.box_radius) / (64 * n)

    def rhs(x, y):
        return [y[1], (0.5 * n**2 * float(V(n * x)) - n**2 * lam) * y[0]]

    check = solve_ivp(
        rhs, (0.0, rho[-1]), [0.0, sol.f[0]], method="RK45", t_eval=rho,
        rtol=RTOL, atol=ATOL / n, max_step=max_step,
    )
    if not check.success:
        raise IntegrationError(f"rescaled integration failed: {check.message}")
    residual = float(np.linalg.norm(check.y[0] - target) / np.linalg.norm(target))

    if V.is_zero:
        rescaled = unscaled = 0.0
    else:
        mask = sol.radii <= sol.support_radius
        r = sol.radii[mask]
        unscaled = float(simpson(4 * np.pi * r**2 * V(r) * sol.f[mask], x=r))
        rho_in = r / n
        rescaled = float(simpson(4 * np.pi * rho_in**2 * n**3 * V(n * rho_in) * sol.f[mask], x=rho_in))

    return RescaledProfiles(
        n=n, f=f_vals, w=1.0 - f_vals, vf=vf, residual=residual,
        rescaled_integral=rescaled, unscaled_integral=unscaled,
    )


# --- Fourier transforms of rescaled kernels ---


def _support_nodes(sol: ScatteringSolution) -> np.ndarray:
    return sol.radii <= sol.support_radius * (1 + 1e-12)


def scaled_transform(radii: np.ndarray, values: np.ndarray, n: float, prefactor: float) -> Callable:
    """k ↦ prefactor·ĝ(k/N), the transform of prefactor·N³·g(N·)."""
    return lambda k: prefactor * n**3 * scaled_fourier(radii, values, k, n)


def interaction_transform(sol: ScatteringSolution, n: int) -> Callable:
    """Transform of N³V(N·)f(N·)."""
    mask = _support_nodes(sol)
    r = sol.radii[mask]
    return scaled_transform(r, sol.potential(r) * sol.f[mask], n, 1.0)


def pair_transform(V: RadialPotential, n: int) -> Callable:
    """Transform of the pair potential N²V(N·)."""
    if V.is_zero:
        return lambda k: np.zeros_like(np.asarray(k, dtype=float))
    return scaled_transform(V.radii, V(V.radii), n, 1.0 / n)


def correlation_transform(sol: ScatteringSolution, n: int) -> Callable:
    """Transform of w(N·)."""
    return scaled_transform(sol.radii, sol.w, n, 1.0 / n**3)


def interaction_kernel(sol: ScatteringSolution, n: int, grid: SpatialGrid) -> ConvolutionKernel:
    """N³V(N·)f_ℓ(N·) as a convolution kernel for the modified GP equation."""
    if sol.potential is None or sol.potential.is_zero:
        return ConvolutionKernel(np.zeros(grids.shape(grid)), label=f"zero N={n}")
    return ConvolutionKernel(grids.kernel_spectrum(grid, interaction_transform(sol, n)), label=f"N^3 V f N={n}")
