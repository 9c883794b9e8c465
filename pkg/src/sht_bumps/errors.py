"""Exception hierarchy shared by the numerical core, the experiments and the CLI."""

from __future__ import annotations

from typing import Any, Dict, Optional


class ToolkitError(Exception):
    """Base class for every error raised on purpose by the toolkit."""


class DomainError(ToolkitError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(ToolkitError, ValueError):
    """A tuning parameter (eta, a, lambda, epsilon, ...) is out of range."""


class DegenerateSetError(ToolkitError, ValueError):
    """A set of measure zero was passed where a positive measure is required."""


class CoverageError(ToolkitError, ValueError):
    """A dyadic grid does not cover the support of a function."""


class PreconditionError(ToolkitError, ValueError):
    """A stopping-time threshold is below the finite-measure level."""


class ConvergenceError(ToolkitError, RuntimeError):
    """A bracketing or iterative procedure failed to converge."""


class InvariantError(ToolkitError, AssertionError):
    """A structural invariant failed; ``witness`` names the offending object."""

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.witness: Dict[str, Any] = dict(witness or {})
