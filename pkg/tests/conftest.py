"""Shared test factories for gp-fluctuations tests."""

import numpy as np

from src.core import fockspace as fs
from src.core.bogoliubov import PairKernel, scaled_kernel
from src.core.gpdynamics import gaussian_packet, initial_state
from src.core.io import build_config
from src.core.modes import trig_modes
from src.core.potentials import build_potential
from src.models.results import CheckResult, ConvolutionKernel, ExperimentRecord, GPState, ModeBasis
from src.models.schemas import PotentialPreset, PotentialSpec, RunConfig, SpatialGrid, Variant


def make_potential(preset: str = "square-well", v0: float = 10.0, radius: float = 1.0):
    return build_potential(PotentialSpec(preset=PotentialPreset(preset), v0=v0, radius=radius))


def make_grid(
    points: int = 64, length: float = 2 * np.pi, dimension: int = 1, transverse_area: float = 1.0
) -> SpatialGrid:
    return SpatialGrid(dimension=dimension, points=points, length=length, transverse_area=transverse_area)


def make_state(
    grid: SpatialGrid | None = None,
    width: float = 0.8,
    momentum: float = 0.0,
    a0: float = 0.0,
    variant: Variant = Variant.GP,
    kernel: ConvolutionKernel | None = None,
    v_ext: np.ndarray | None = None,
) -> GPState:
    grid = grid or make_grid()
    return initial_state(gaussian_packet(grid, width, momentum), grid, a0, variant, kernel, v_ext)


def make_basis(modes: int = 3, n_max: int = 4) -> fs.FockBasis:
    return fs.enumerate_basis(modes, n_max)


def make_rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def make_unit(m: int = 3, seed: int = 0, real: bool = False) -> np.ndarray:
    rng = make_rng(seed)
    v = rng.standard_normal(m) + (0 if real else 1j * rng.standard_normal(m))
    return (v / np.linalg.norm(v)).astype(complex)


def make_kernel(modes: int = 2, norm: float = 0.2, seed: int = 0, phi: np.ndarray | None = None) -> PairKernel:
    return scaled_kernel(modes, norm, make_rng(seed), phi)


def make_modes(m: int = 4, points: int = 64, transverse_area: float = 1.0) -> ModeBasis:
    return trig_modes(m, make_grid(points=points, transverse_area=transverse_area))


def make_check(
    name: str = "identity", passed: bool = True, residual: float = 1e-14, threshold: float = 1e-12, detail: str = ""
) -> CheckResult:
    return CheckResult(name=name, passed=passed, residual=residual, threshold=threshold, detail=detail)


def make_record(
    name: str = "sweep",
    series: dict | None = None,
    scalars: dict | None = None,
    checks: list[CheckResult] | None = None,
) -> ExperimentRecord:
    return ExperimentRecord(
        name=name,
        series=series if series is not None else {"n": [1.0, 2.0], "value": [0.5, 0.25]},
        scalars=scalars or {},
        checks=checks or [],
    )


def make_config(scenario: str = "fock-check", **entries) -> RunConfig:
    """``make_config(fock__modes=2)`` sets ``fock.modes = 2``."""
    flat = {"scenario": scenario}
    flat.update({key.replace("__", "."): str(value) for key, value in entries.items()})
    return build_config(flat)
