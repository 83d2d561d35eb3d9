"""Exception types shared across the package.

Two broad families matter for scripting: parameter/usage problems
(ParameterError) and data or numerical degeneracies discovered while
processing otherwise well-formed inputs (DataError). The CLI maps them
to exit codes 2 and 3 respectively.
"""


class SpecfuseError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(SpecfuseError, ValueError):
    """A parameter or input violates a documented precondition."""


class DataError(SpecfuseError, ValueError):
    """Well-formed input turned out to be degenerate or numerically unusable."""


class DegenerateScaleError(DataError):
    """A self-tuning bandwidth collapsed to zero (duplicate points)."""


class IsolatedVertexError(DataError):
    """A graph vertex has zero degree; the normalized Laplacian is undefined."""
