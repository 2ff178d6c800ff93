"""Periodic grid helpers: coordinates, spectral derivatives, quadrature, convolution.

Grid fields are numpy arrays of shape ``(points,) * dimension``. Integrals
are plain Riemann sums with the cell volume, which is spectrally accurate
for smooth periodic integrands. In the quasi one-dimensional analog the
condensate is uniform across a cross-section of area A, so integrals run
along the axis and the 1/A factors live in the kernels.
"""

from typing import Callable

import numpy as np

from src.models.schemas import SpatialGrid


def axis(grid: SpatialGrid) -> np.ndarray:
    """Centered node positions in [−L/2, L/2)."""
    h = grid.length / grid.points
    return (np.arange(grid.points) - grid.points // 2) * h


def shape(grid: SpatialGrid) -> tuple[int, ...]:
    return (grid.points,) * grid.dimension


def coordinates(grid: SpatialGrid) -> list[np.ndarray]:
    x = axis(grid)
    return list(np.meshgrid(*([x] * grid.dimension), indexing="ij"))


def radius(grid: SpatialGrid) -> np.ndarray:
    """|x| of the centered coordinates."""
    return np.sqrt(sum(c**2 for c in coordinates(grid)))


def wavenumbers(grid: SpatialGrid) -> list[np.ndarray]:
    k = 2 * np.pi * np.fft.fftfreq(grid.points, d=grid.length / grid.points)
    return list(np.meshgrid(*([k] * grid.dimension), indexing="ij"))


def k_squared(grid: SpatialGrid) -> np.ndarray:
    return sum(k**2 for k in wavenumbers(grid))


def cell_volume(grid: SpatialGrid) -> float:
    return (grid.length / grid.points) ** grid.dimension


def integrate(grid: SpatialGrid, values: np.ndarray) -> complex | float:
    return values.sum() * cell_volume(grid)


def inner(grid: SpatialGrid, a: np.ndarray, b: np.ndarray) -> complex:
    """⟨a, b⟩, antilinear in the first argument."""
    return complex(np.vdot(a, b) * cell_volume(grid))


def norm(grid: SpatialGrid, psi: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(psi) ** 2) * cell_volume(grid)))


def normalize(grid: SpatialGrid, psi: np.ndarray) -> np.ndarray:
    return psi / norm(grid, psi)


def displacement_radius(grid: SpatialGrid) -> np.ndarray:
    """Minimal-image |z| for displacements z in FFT order (z = 0 at index 0)."""
    h = grid.length / grid.points
    i = np.arange(grid.points)
    d = np.minimum(i, grid.points - i) * h
    mesh = np.meshgrid(*([d] * grid.dimension), indexing="ij")
    return np.sqrt(sum(c**2 for c in mesh))


def gradient(grid: SpatialGrid, psi: np.ndarray) -> list[np.ndarray]:
    psi_hat = np.fft.fftn(psi)
    return [np.fft.ifftn(1j * k * psi_hat) for k in wavenumbers(grid)]


def laplacian(grid: SpatialGrid, psi: np.ndarray) -> np.ndarray:
    return np.fft.ifftn(-k_squared(grid) * np.fft.fftn(psi))


def kinetic_energy(grid: SpatialGrid, psi: np.ndarray) -> float:
    """∫|∇ψ|² by Parseval."""
    psi_hat = np.fft.fftn(psi)
    n_total = grid.points**grid.dimension
    return float(np.sum(k_squared(grid) * np.abs(psi_hat) ** 2) * cell_volume(grid) / n_total)


def convolve(spectrum: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """(K ∗ ρ)(x) on the torus, K given by its continuum Fourier coefficients."""
    return np.fft.ifftn(spectrum * np.fft.fftn(rho))


def kernel_spectrum(grid: SpatialGrid, radial_transform: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Evaluate a radial Fourier transform at the grid wavenumbers.

    In the quasi one-dimensional analog the transverse average divides by A.
    """
    kk = np.sqrt(k_squared(grid))
    unique, inverse = np.unique(np.round(kk, 12), return_inverse=True)
    values = np.asarray(radial_transform(unique), dtype=float)[inverse].reshape(kk.shape)
    if grid.dimension == 1:
        values = values / grid.transverse_area
    return values
