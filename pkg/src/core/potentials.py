"""Radial pair potentials and radial Fourier transforms."""

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.integrate import simpson

from src.core.errors import DomainError
from src.models.schemas import PotentialPreset, PotentialSpec

# k-chunk for the (k, r) quadrature matrix
_FT_CHUNK = 256


@dataclass(frozen=True, eq=False)
class RadialPotential:
    """Nonnegative spherically symmetric potential supported in [0, R_V].

    ``samples`` are values on the uniform grid ``radii`` covering [0, R_V];
    ``profile`` is an exact evaluator when the potential is analytic,
    otherwise evaluation interpolates the samples.
    """
    radii: np.ndarray
    samples: np.ndarray
    support_radius: float
    name: str = "table"
    profile: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.samples)):
            raise DomainError("potential samples must be finite", parameter="V")
        if np.any(self.samples < 0):
            raise DomainError(
                f"potential is negative (min {self.samples.min():.3g})", parameter="V"
            )

    @property
    def is_zero(self) -> bool:
        return self.support_radius == 0 or not np.any(self.samples > 0)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.is_zero:
            return np.zeros_like(r)
        if self.profile is not None:
            values = self.profile(r)
        else:
            values = np.interp(r, self.radii, self.samples)
        return np.where(r <= self.support_radius, values, 0.0)


def _from_profile(name: str, radius: float, profile: Callable, points: int = 1025) -> RadialPotential:
    radii = np.linspace(0.0, radius, points)
    return RadialPotential(radii, profile(radii), radius, name=name, profile=profile)


def zero_potential() -> RadialPotential:
    return RadialPotential(np.zeros(1), np.zeros(1), 0.0, name="zero")


def square_well(v0: float, radius: float) -> RadialPotential:
    return _from_profile("square-well", radius, lambda r: np.full_like(np.asarray(r, dtype=float), v0))


def soft_sphere(v0: float, radius: float) -> RadialPotential:
    return _from_profile("soft-sphere", radius, lambda r: v0 * (1.0 - (np.asarray(r) / radius) ** 2))


def bump(v0: float, radius: float) -> RadialPotential:
    """Smooth compactly supported V0·(1 − (r/R)²)³."""
    return _from_profile("bump", radius, lambda r: v0 * (1.0 - (np.asarray(r) / radius) ** 2) ** 3)


def from_table(path: Path) -> RadialPotential:
    """Read ``r,V`` rows (one header line) from a CSV file."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 2 or data.shape[0] < 2:
        raise DomainError(f"expected two columns r,V in {path}", parameter="potential.table")
    radii, samples = data[:, 0], data[:, 1]
    if radii[0] != 0.0 or np.any(np.diff(radii) <= 0):
        raise DomainError("table radii must start at 0 and increase", parameter="potential.table")
    return RadialPotential(radii, samples, float(radii[-1]), name=f"table:{Path(path).name}")


def build_potential(spec: PotentialSpec) -> RadialPotential:
    if spec.preset == PotentialPreset.ZERO or (spec.v0 == 0 and spec.preset != PotentialPreset.TABLE):
        return zero_potential()
    if spec.preset == PotentialPreset.SQUARE_WELL:
        return square_well(spec.v0, spec.radius)
    if spec.preset == PotentialPreset.SOFT_SPHERE:
        return soft_sphere(spec.v0, spec.radius)
    if spec.preset == PotentialPreset.BUMP:
        return bump(spec.v0, spec.radius)
    return from_table(spec.table)


def radial_fourier(radii: np.ndarray, values: np.ndarray, k: np.ndarray) -> np.ndarray:
    """K̂(k) = 4π ∫ r² K(r) sin(kr)/(kr) dr for a radial profile on ``radii``."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.empty(k.shape)
    weight = 4 * np.pi * radii**2 * values
    for start in range(0, k.size, _FT_CHUNK):
        chunk = k[start:start + _FT_CHUNK]
        integrand = weight[None, :] * np.sinc(np.outer(chunk, radii) / np.pi)
        out[start:start + _FT_CHUNK] = simpson(integrand, x=radii, axis=1)
    return out


def scaled_fourier(radii: np.ndarray, values: np.ndarray, k: np.ndarray, n: float) -> np.ndarray:
    """Fourier transform of g(N·) from the profile of g: N⁻³·ĝ(k/N)."""
    return radial_fourier(radii, values, np.asarray(k, dtype=float) / n) / n**3
