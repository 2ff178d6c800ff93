"""Tests for MCP error handling decorator."""

from src.core.errors import (
    ConfigError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    GPFluctuationsError,
    NumericFailure,
    ResourceError,
    SolverError,
)
from src.mcp.error_handling import handle_tool_errors


def _raising(exc: Exception):
    @handle_tool_errors
    async def tool():
        raise exc

    return tool


class TestHandleToolErrors:
    async def test_returns_result_on_success(self):
        @handle_tool_errors
        async def tool():
            return "ok"

        assert await tool() == "ok"

    async def test_catches_config_error(self):
        result = await _raising(ConfigError("fock.modes", "must be positive"))()
        assert result == "Config error in 'fock.modes': must be positive"

    async def test_catches_domain_error(self):
        result = await _raising(DomainError("must be positive", parameter="dt"))()
        assert result == "Invalid input: dt: must be positive"

    async def test_catches_resource_error(self):
        result = await _raising(ResourceError("Fock dimension", 300000, 200000))()
        assert result.startswith("Problem too large: Fock dimension 300000")

    async def test_catches_numeric_failures(self):
        result = await _raising(NumericFailure("NaN in psi", t=0.5))()
        assert result == "Numerical failure (NumericFailure): NaN in psi at t=0.5"
        result = await _raising(ConvergenceError("ground state", 200))()
        assert "ConvergenceError" in result
        assert "200 iterations" in result
        result = await _raising(SolverError("no bracket"))()
        assert result == "Numerical failure (SolverError): no bracket"

    async def test_catches_consistency_error(self):
        result = await _raising(ConsistencyError("not unitary"))()
        assert result == "Consistency check failed: not unitary"

    async def test_catches_base_error(self):
        result = await _raising(GPFluctuationsError("something"))()
        assert result == "Error: something"

    async def test_catches_validation_error(self):
        @handle_tool_errors
        async def tool():
            from src.models.schemas import FockDimensionInput
            FockDimensionInput()  # type: ignore[call-arg]

        result = await tool()
        assert "Invalid data" in result
        assert "2 validation error(s)" in result

    async def test_catches_unexpected(self):
        result = await _raising(RuntimeError("boom"))()
        assert result == "Unexpected error: RuntimeError: boom"

    async def test_preserves_name(self):
        @handle_tool_errors
        async def my_tool():
            return "x"

        assert my_tool.__name__ == "my_tool"
