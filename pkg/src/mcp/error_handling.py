"""Consistent error handling for MCP tool functions."""

from __future__ import annotations

import functools
import logging
from typing import Callable

from pydantic import ValidationError

from src.core.errors import (
    ConfigError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    GPFluctuationsError,
    IntegrationError,
    NumericFailure,
    ResourceError,
    SolverError,
)

logger = logging.getLogger("gp_fluctuations")


def handle_tool_errors(fn: Callable) -> Callable:
    """Decorator that catches known exceptions and returns user-friendly error strings.

    MCP tools must return ``str``, not raise.  This ensures all tools
    follow that contract without duplicating try/except blocks.
    """

    @functools.wraps(fn)
    async def wrapper(*args, **kwargs):
        try:
            return await fn(*args, **kwargs)
        except ConfigError as e:
            return f"Config error in '{e.key}': {e.detail}"
        except DomainError as e:
            return f"Invalid input: {e}"
        except ResourceError as e:
            return f"Problem too large: {e}. Reduce the mode count or particle number."
        except (SolverError, IntegrationError, NumericFailure, ConvergenceError) as e:
            return f"Numerical failure ({type(e).__name__}): {e}"
        except ConsistencyError as e:
            logger.error("consistency failure in tool %s: %s", fn.__name__, e)
            return f"Consistency check failed: {e}"
        except GPFluctuationsError as e:
            return f"Error: {e}"
        except ValidationError as e:
            return f"Invalid data: {e.error_count()} validation error(s). Check your input."
        except Exception as e:
            logger.exception("Unexpected error in tool %s", fn.__name__)
            return f"Unexpected error: {type(e).__name__}: {e}"

    return wrapper
