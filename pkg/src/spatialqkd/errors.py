"""Exception types shared across the package.

Two broad failure families exist: a run can be misconfigured (bad file,
inconsistent parameters, impossible request) or a numerical procedure can
fail its own validity checks (resolution, normalization, coverage). The
command line front end maps the first family to exit code 1 and the
second to exit code 2, so every raise site below chooses the base class
accordingly.
"""


class ConfigurationError(Exception):
    """A run request is invalid before any numerics start."""


class NumericalModelError(Exception):
    """A numerical procedure cannot produce a trustworthy result."""


class GridResolutionError(NumericalModelError):
    """A grid is too coarse to resolve the narrowest feature it must carry."""


class NormalizationError(NumericalModelError):
    """A density or amplitude fails its normalization invariant."""


class CoverageError(NumericalModelError):
    """A requested coverage interval does not fit inside the available grid."""


class ResolutionBudgetError(NumericalModelError):
    """A requested resolution exceeds the configured memory budget."""

    def __init__(self, message: str, suggested: int | None = None):
        super().__init__(message)
        self.suggested = suggested


class NoAcceptedEventsError(NumericalModelError):
    """Every gate is rejected, so conditional statistics are undefined."""
