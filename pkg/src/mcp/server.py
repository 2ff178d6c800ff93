"""gp-fluctuations MCP Server.

Exposes the scattering solvers, the GP ground state and the regression
scenarios as read-only MCP tools.
"""

import asyncio
import sys
from contextlib import asynccontextmanager
from math import comb
from pathlib import Path

from dotenv import load_dotenv
from mcp.server.fastmcp import Context, FastMCP

# Ensure project root is on sys.path so `src` is importable when loaded
# directly by tools like `mcp dev` (which use importlib, not `python -m`).
_project_root = str(Path(__file__).resolve().parent.parent.parent)
if _project_root not in sys.path:
    sys.path.insert(0, _project_root)

load_dotenv()

from src.core.gpdynamics import euler_lagrange_residual, external_potential, gp_energy, gp_ground_state
from src.core.io import build_config
from src.core.potentials import build_potential
from src.core.scattering import decay_constants, solve_neumann, solve_zero_energy
from src.core.settings import Settings, get_settings
from src.core.suites import run_suite
from src.mcp.error_handling import handle_tool_errors
from src.mcp.formatters import (
    format_fock_dimension,
    format_ground_state,
    format_neumann,
    format_run,
    format_scattering_length,
)
from src.models.schemas import (
    FockDimensionInput,
    GPEnergyInput,
    NeumannInput,
    PotentialSpec,
    RunScenarioInput,
    ScatteringLengthInput,
    SpatialGrid,
)


# --- Lifespan: initialize shared resources ---


@asynccontextmanager
async def app_lifespan(server: FastMCP):
    yield {"settings": get_settings()}


mcp = FastMCP("gp_fluctuations", lifespan=app_lifespan)


def _get_settings(ctx) -> Settings:
    return ctx.request_context.lifespan_context["settings"]


def _potential(params: ScatteringLengthInput):
    return build_potential(PotentialSpec(preset=params.preset, v0=params.v0, radius=params.radius))


_READ_ONLY = {
    "readOnlyHint": True,
    "destructiveHint": False,
    "idempotentHint": True,
    "openWorldHint": False,
}


# --- Tools ---


@mcp.tool(name="gpf_scattering_length", annotations={"title": "Scattering Length", **_READ_ONLY})
@handle_tool_errors
async def gpf_scattering_length(params: ScatteringLengthInput, ctx: Context) -> str:
    """Solve the zero-energy scattering equation and report the scattering length a0."""
    V = _potential(params)
    sol = await asyncio.to_thread(solve_zero_energy, V, None, params.grid_points)
    return format_scattering_length(sol, V.name)


@mcp.tool(name="gpf_neumann_problem", annotations={"title": "Neumann Scattering Problem", **_READ_ONLY})
@handle_tool_errors
async def gpf_neumann_problem(params: NeumannInput, ctx: Context) -> str:
    """Solve the Neumann problem on the ball of radius N*ell and compare lambda_ell with 3a0/(N ell)^3."""
    V = _potential(params)
    zero = await asyncio.to_thread(solve_zero_energy, V, None, params.grid_points)
    sol = await asyncio.to_thread(solve_neumann, V, params.n, params.ell, params.grid_points)
    return format_neumann(sol, zero.a0, decay_constants(sol))


@mcp.tool(name="gpf_gp_energy", annotations={"title": "GP Ground State Energy", **_READ_ONLY})
@handle_tool_errors
async def gpf_gp_energy(params: GPEnergyInput, ctx: Context) -> str:
    """Minimize the trapped GP functional on a periodic 1D grid and report its energy."""
    grid = SpatialGrid(dimension=1, points=params.points, length=params.length)
    v_ext = external_potential(grid, params.trap, params.trap_strength)
    state = await asyncio.to_thread(gp_ground_state, v_ext, params.a0, grid)
    return format_ground_state(state, gp_energy(state), euler_lagrange_residual(state))


@mcp.tool(name="gpf_fock_dimension", annotations={"title": "Fock Space Dimension", **_READ_ONLY})
@handle_tool_errors
async def gpf_fock_dimension(params: FockDimensionInput, ctx: Context) -> str:
    """Dimension of the truncated Fock space over M modes with at most N particles."""
    dimension = comb(params.n_max + params.modes, params.modes)
    return format_fock_dimension(params.modes, params.n_max, dimension, _get_settings(ctx).dimension_cap)


@mcp.tool(name="gpf_run_scenario", annotations={"title": "Run Scenario", **_READ_ONLY})
@handle_tool_errors
async def gpf_run_scenario(params: RunScenarioInput, ctx: Context) -> str:
    """Run a regression scenario in memory and report its checks. Nothing is written to disk."""
    entries = {"scenario": params.scenario.value, "seed": str(params.seed), **params.overrides}
    config = build_config(entries)
    records = await asyncio.to_thread(run_suite, config)
    return format_run(config.scenario.value, records)


# --- Entry point ---

if __name__ == "__main__":
    mcp.run()
