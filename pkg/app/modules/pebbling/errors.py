from __future__ import annotations


class PebblingError(Exception):
    """Base class for every error raised by the pebbling toolkit."""

    exit_code: int = 1


class GraphError(PebblingError, ValueError):
    """Invalid graph input, unknown vertex, disconnected graph, unknown catalog key."""

    exit_code = 2


class ConfigurationError(GraphError):
    """A pebble configuration that does not fit its graph."""


class BudgetExceededError(PebblingError):
    """
    The oracle gave up: either an unsolvable configuration exists at the
    size cap (so the cap was too small) or the visited-state budget ran out.
    The bound search is inconclusive in both cases.
    """

    exit_code = 4


class CertificateError(PebblingError, ValueError):
    """Malformed or unusable certificate (mixed roots, uncovered vertex, ...)."""

    exit_code = 1


class UnboundedLPError(CertificateError):
    pass


class ExtractionError(CertificateError):
    """A solver assignment that does not describe valid tree strategies."""


class ModelError(PebblingError, ValueError):
    exit_code = 2


class SolutionError(PebblingError, ValueError):
    exit_code = 3


class SolverError(PebblingError, RuntimeError):
    exit_code = 3


class ConfigError(PebblingError, ValueError):
    exit_code = 2
