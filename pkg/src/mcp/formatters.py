"""Markdown formatters for MCP tool responses.

Pure functions that take result objects and return human-readable Markdown strings.
"""

from __future__ import annotations

from src.models.results import CheckResult, ExperimentRecord, GPState, ScatteringSolution


def _num(value: float) -> str:
    return f"{value:.6g}"


def format_scattering_length(sol: ScatteringSolution, potential_name: str) -> str:
    lines = [f"## Scattering Length ({potential_name})\n"]
    lines.append(f"- **a0**: {_num(sol.a0)}")
    lines.append(f"- **Support radius**: {_num(sol.support_radius)}")
    lines.append(f"- **Outer fit residual**: {sol.fit_residual:.2e}")
    lines.append(f"- **Radial grid**: {len(sol.radii)} points up to r = {_num(sol.box_radius)}")
    if sol.a0 == 0:
        lines.append("\nThe potential vanishes; f = 1 everywhere.")
    return "\n".join(lines)


def format_neumann(sol: ScatteringSolution, a0: float, decay: tuple[float, float]) -> str:
    lines = [f"## Neumann Problem (N = {sol.n}, ell = {_num(sol.ell)})\n"]
    lines.append(f"- **lambda_ell**: {_num(sol.lambda_ell)}")
    lines.append(f"- **Box radius N*ell**: {_num(sol.box_radius)}")
    lines.append(f"- **f_ell range**: [{_num(float(sol.f.min()))}, {_num(float(sol.f.max()))}]")
    if a0 > 0:
        ratio = sol.lambda_ell * (sol.n * sol.ell) ** 3 / (3 * a0)
        lines.append(f"- **lambda_ell (N ell)^3 / (3 a0)**: {_num(ratio)}")
    lines.append(f"- **Decay constants**: w <= {_num(decay[0])}/r, |grad w| <= {_num(decay[1])}/r^2")
    return "\n".join(lines)


def format_ground_state(state: GPState, energy: float, residual: float) -> str:
    grid = state.grid
    lines = ["## GP Ground State\n"]
    lines.append(f"- **Energy**: {_num(energy)}")
    lines.append(f"- **Euler-Lagrange residual**: {residual:.2e}")
    lines.append(f"- **a0**: {_num(state.a0)}")
    lines.append(f"- **Grid**: {grid.points} points, length {_num(grid.length)}, dimension {grid.dimension}")
    return "\n".join(lines)


def format_fock_dimension(modes: int, n_max: int, dimension: int, cap: int) -> str:
    lines = ["## Fock Space Size\n"]
    lines.append(f"- **Modes M**: {modes}")
    lines.append(f"- **Truncation N**: {n_max}")
    lines.append(f"- **dim F^(<=N)**: {dimension:,}")
    if dimension > cap:
        lines.append(f"\nExceeds the configured cap of {cap:,}; scenarios at this size will be refused.")
    return "\n".join(lines)


def format_checks(checks: list[CheckResult]) -> str:
    if not checks:
        return "No checks recorded."
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        detail = f" ({c.detail})" if c.detail else ""
        lines.append(f"- {status} **{c.name}**: {c.residual:.3e} vs {c.threshold:.3e}{detail}")
    return "\n".join(lines)


def format_run(scenario: str, records: list[ExperimentRecord]) -> str:
    checks = [c for r in records for c in r.checks]
    failed = sum(not c.passed for c in checks)
    lines = [f"## Scenario: {scenario}\n"]
    verdict = "all checks passed" if failed == 0 else f"{failed} of {len(checks)} checks failed"
    lines.append(f"**{len(records)} records, {len(checks)} checks: {verdict}**")
    for record in records:
        if not record.checks and not record.scalars:
            continue
        lines.append(f"\n### {record.name}")
        for name, value in record.scalars.items():
            lines.append(f"- {name}: {_num(value)}")
        if record.checks:
            lines.append(format_checks(record.checks))
    return "\n".join(lines)
