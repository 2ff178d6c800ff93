"""Pydantic models for validated inputs: run configuration, grids, potentials, tool inputs."""

import math
from enum import Enum
from pathlib import Path
from typing import Annotated, Optional

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator, model_validator


# --- Enums ---

class Scenario(str, Enum):
    SCATTER = "scatter"
    GP = "gp"
    COMPARE_GP = "compare-gp"
    FOCK_CHECK = "fock-check"
    BOGOLIUBOV_CHECK = "bogoliubov-check"
    GENERATOR_CHECK = "generator-check"
    DEPLETION = "depletion"
    ALL_REGRESSIONS = "all-regressions"


class Variant(str, Enum):
    GP = "gp"
    MODIFIED_GP = "modified-gp"


class PotentialPreset(str, Enum):
    ZERO = "zero"
    SQUARE_WELL = "square-well"
    SOFT_SPHERE = "soft-sphere"
    BUMP = "bump"
    TABLE = "table"


class TrapPreset(str, Enum):
    NONE = "none"
    HARMONIC = "harmonic"
    QUARTIC = "quartic"


class Symmetry(str, Enum):
    HERMITIAN = "hermitian"
    ANTIHERMITIAN = "antihermitian"
    UNITARY = "unitary"
    NONE = "none"


class PiKind(str, Enum):
    PI1 = "pi1"
    PI2 = "pi2"
    PI1_TILDE = "pi1_tilde"


class QuadraticKind(str, Enum):
    A = "A"
    B = "B"


class InitialState(str, Enum):
    VACUUM = "vacuum"
    PRODUCT = "product"


class CondensateReference(str, Enum):
    """Flow that defines the reference condensate in mode space.

    ``bare`` is the mean-field flow of the truncated Hamiltonian itself,
    with the tensor N·T of N²V(N·). The cutoff cannot resolve the short
    scale correlation that turns V̂(0) into 8πa₀, so only this flow keeps
    the excitation number of 𝓗_N bounded in N on a few modes.
    """
    MODIFIED_GP = "modified-gp"
    BARE = "bare"
    GP = "gp"



def _split_list(value):
    """Accept ``"25, 50, 100"`` as well as real lists for list-valued keys."""
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    if isinstance(value, (int, float)):
        return [value]
    return value


IntList = Annotated[list[int], BeforeValidator(_split_list)]
FloatList = Annotated[list[float], BeforeValidator(_split_list)]


# --- Domain inputs ---

class SpatialGrid(BaseModel):
    """Periodic grid with ``points`` nodes per axis on a box of side ``length``.

    For ``dimension == 1`` the grid is the longitudinal axis of a quasi
    one-dimensional slab with cross-section ``transverse_area``; three
    dimensional kernels enter through their transverse average.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    dimension: int = Field(1, description="Spatial dimension, 1 or 3")
    points: int = Field(256, description="Grid points per axis (power of two)")
    length: float = Field(2 * math.pi, gt=0, description="Box side length")
    transverse_area: float = Field(1.0, gt=0, description="Cross-section of the 1D slab")

    @field_validator("dimension")
    @classmethod
    def _dimension_one_or_three(cls, v: int) -> int:
        if v not in (1, 3):
            raise ValueError("dimension must be 1 or 3")
        return v

    @field_validator("points")
    @classmethod
    def _power_of_two(cls, v: int) -> int:
        if v < 2 or v & (v - 1):
            raise ValueError("points per axis must be a power of two")
        return v


class PotentialSpec(BaseModel):
    """Preset selection for the radial pair potential V."""
    model_config = ConfigDict(extra="forbid")

    preset: PotentialPreset = PotentialPreset.SQUARE_WELL
    v0: float = Field(10.0, ge=0, description="Potential height")
    radius: float = Field(1.0, gt=0, description="Support radius R")
    table: Optional[Path] = Field(None, description="CSV file with r,V columns (preset=table)")

    @model_validator(mode="after")
    def _table_needs_path(self) -> "PotentialSpec":
        if self.preset == PotentialPreset.TABLE and self.table is None:
            raise ValueError("preset 'table' requires a table path")
        return self


# --- Run configuration blocks ---

class ScatterBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(100, ge=1)
    ell: float = Field(0.5, gt=0)
    grid_points: int = Field(2048, ge=512)
    r_max_factor: float = Field(10.0, gt=1)
    n_values: IntList = Field(default_factory=lambda: [50, 100, 200, 400])


class GPBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dimension: int = 1
    points: int = 256
    length: float = Field(20.0, gt=0)
    transverse_area: float = Field(1.0, gt=0)
    dt: float = Field(1e-3, gt=0)
    t_final: float = Field(1.0, gt=0)
    ell: float = Field(0.5, gt=0)
    n_values: IntList = Field(default_factory=lambda: [25, 50, 100, 200])
    trap: TrapPreset = TrapPreset.NONE
    trap_strength: float = Field(1.0, ge=0)
    packet_width: float = Field(1.0, gt=0)
    momentum: float = 0.0
    tol: float = Field(1e-10, gt=0)

    def grid(self) -> SpatialGrid:
        return SpatialGrid(
            dimension=self.dimension, points=self.points,
            length=self.length, transverse_area=self.transverse_area,
        )


class FockBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    modes: int = Field(3, ge=1)
    n: int = Field(4, ge=1)
    samples: int = Field(50, ge=1)
    excitations: bool = False


class BogoliubovBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    modes: int = Field(2, ge=1)
    n: int = Field(4, ge=2)
    eta_norm: float = Field(0.2, ge=0)
    smallness: float = Field(0.25, gt=0)
    order: int = Field(12, ge=0)
    n_values: IntList = Field(default_factory=lambda: [4, 8, 16])
    remainder_n_values: IntList = Field(default_factory=lambda: [16, 32, 64])
    standard_truncations: IntList = Field(default_factory=lambda: [12, 24])
    kernels_from_gp: bool = False


class GeneratorBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    modes: int = Field(4, ge=2)
    n_values: IntList = Field(default_factory=lambda: [3, 4, 5])
    ell: float = Field(0.5, gt=0)
    t: float = Field(0.2, ge=0)
    delta: float = Field(1e-3, gt=0)
    grid_points: int = 64
    transverse_area: float = Field(10.0, gt=0)
    energy_n_values: IntList = Field(default_factory=lambda: [16, 32, 64])
    energy_times: FloatList = Field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    bound_times: FloatList = Field(default_factory=lambda: [0.0, 0.1, 0.2])
    reference: CondensateReference = CondensateReference.MODIFIED_GP
    energy_dt: float = Field(1e-3, gt=0)


class DepletionBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    modes: int = Field(3, ge=2)
    n_values: IntList = Field(default_factory=lambda: [4, 8])
    ell: float = Field(0.5, gt=0)
    t_final: float = Field(0.5, gt=0)
    steps: int = Field(5, ge=1)
    initial: InitialState = InitialState.VACUUM
    grid_points: int = 64
    transverse_area: float = Field(10.0, gt=0)
    reference: CondensateReference = CondensateReference.BARE
    trap: TrapPreset = TrapPreset.NONE
    trap_strength: float = Field(1.0, ge=0)


class RunConfig(BaseModel):
    """Validated run configuration. Unknown keys are rejected at every level."""
    model_config = ConfigDict(extra="forbid")

    scenario: Scenario
    seed: int = 0
    output: Optional[Path] = None
    potential: PotentialSpec = Field(default_factory=PotentialSpec)
    scatter: ScatterBlock = Field(default_factory=ScatterBlock)
    gp: GPBlock = Field(default_factory=GPBlock)
    fock: FockBlock = Field(default_factory=FockBlock)
    bogoliubov: BogoliubovBlock = Field(default_factory=BogoliubovBlock)
    generator: GeneratorBlock = Field(default_factory=GeneratorBlock)
    depletion: DepletionBlock = Field(default_factory=DepletionBlock)


# --- MCP Tool Input Models ---

class ScatteringLengthInput(BaseModel):
    """Input for computing the scattering length of a preset potential."""
    model_config = ConfigDict(extra="forbid")

    preset: PotentialPreset = Field(PotentialPreset.SQUARE_WELL, description="Potential preset")
    v0: float = Field(10.0, ge=0, description="Potential height")
    radius: float = Field(1.0, gt=0, description="Support radius")
    grid_points: int = Field(2048, ge=512, description="Radial grid points")


class NeumannInput(ScatteringLengthInput):
    """Input for the Neumann scattering problem on a ball of radius N*ell."""

    n: int = Field(100, ge=1, description="Particle number N")
    ell: float = Field(0.5, gt=0, description="Box parameter ell")


class FockDimensionInput(BaseModel):
    """Input for sizing a truncated Fock space."""
    model_config = ConfigDict(extra="forbid")

    modes: int = Field(..., ge=1, description="Number of one-particle modes M")
    n_max: int = Field(..., ge=0, description="Particle-number truncation")


class GPEnergyInput(BaseModel):
    """Input for the GP ground state energy in a trap."""
    model_config = ConfigDict(extra="forbid")

    a0: float = Field(..., ge=0, description="Scattering length")
    trap: TrapPreset = Field(TrapPreset.HARMONIC, description="Trap preset")
    trap_strength: float = Field(1.0, ge=0, description="Trap strength")
    points: int = Field(128, description="Grid points (power of two)")
    length: float = Field(20.0, gt=0, description="Box length")


class RunScenarioInput(BaseModel):
    """Input for running a named scenario with optional config overrides."""
    model_config = ConfigDict(extra="forbid")

    scenario: Scenario = Field(..., description="Scenario name")
    seed: int = Field(0, description="Random seed")
    overrides: dict[str, str] = Field(
        default_factory=dict, description="Extra 'block.key' -> value settings"
    )
