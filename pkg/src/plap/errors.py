"""Exception types shared across the package."""

from __future__ import annotations


class PLapError(Exception):
    """Base class for all library errors."""


class GraphError(PLapError):
    """Structural or semantic problem with a metric graph.

    ``code`` is a short machine-readable tag (e.g. ``"disconnected"``,
    ``"empty-dirichlet"``); the exception message carries the detail.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class ParseError(PLapError):
    """Malformed graph document; ``where`` locates the offending field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


class ZeroFunctionError(PLapError):
    """A Rayleigh quotient was requested for the (numerically) zero function."""


class ConvergenceError(PLapError):
    """Eigenvalue iteration did not meet its tolerances.

    ``pair`` holds the best iterate so callers can still inspect or emit it.
    """

    def __init__(self, message: str, pair=None):
        super().__init__(message)
        self.pair = pair
