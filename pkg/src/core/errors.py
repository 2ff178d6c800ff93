"""Exception hierarchy for gp-fluctuations.

Every failure raised by the numerical core derives from GPFluctuationsError,
so the CLI and the MCP error handler can tell library failures apart from
programming errors.
"""


class GPFluctuationsError(Exception):
    """Base exception for all gp-fluctuations failures."""

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(detail)


class DomainError(GPFluctuationsError):
    """An input lies outside the domain an operation is defined on."""

    def __init__(self, detail: str, parameter: str | None = None):
        self.parameter = parameter
        super().__init__(f"{parameter}: {detail}" if parameter else detail)
        self.detail = detail


class ResourceError(GPFluctuationsError):
    """A configured resource cap (dimension, sparsity) would be exceeded."""

    def __init__(self, resource: str, requested: int, limit: int):
        self.resource = resource
        self.requested = requested
        self.limit = limit
        super().__init__(f"{resource} {requested} exceeds the configured cap {limit}")


class SolverError(GPFluctuationsError):
    """An eigenvalue bracket or Krylov iteration failed."""


class IntegrationError(GPFluctuationsError):
    """An ODE integration did not reach its end point."""


class NumericFailure(GPFluctuationsError):
    """Non-finite values appeared in a state."""

    def __init__(self, detail: str, t: float | None = None):
        self.t = t
        super().__init__(detail if t is None else f"{detail} at t={t:.6g}")
        self.detail = detail


class ConvergenceError(GPFluctuationsError):
    """An iterative method stopped without meeting its tolerance."""

    def __init__(self, detail: str, iterations: int):
        self.iterations = iterations
        super().__init__(f"{detail} after {iterations} iterations")
        self.detail = detail


class ConsistencyError(GPFluctuationsError):
    """A result contradicts a property that holds for every valid input."""


class ConfigError(GPFluctuationsError):
    """Run configuration is invalid. ``key`` names the offending entry."""

    def __init__(self, key: str, detail: str):
        self.key = key
        super().__init__(f"Invalid config key '{key}': {detail}")
        self.detail = detail
