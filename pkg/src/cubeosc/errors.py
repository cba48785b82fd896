"""Exception types shared across the package.

The CLI maps these onto process exit codes: invariant violations exit
with 2, bad input with 3, resource limits with 4.
"""


class CubeOscError(Exception):
    """Base class for all package errors."""


class InvalidShapeError(CubeOscError):
    """Shape fails a structural precondition (degenerate, self-intersecting,
    overlapping union members, unsorted intervals)."""


class InputError(CubeOscError):
    """Caller supplied an argument outside the documented contract."""


class ContractError(CubeOscError):
    """A data-layout precondition was violated (unsnapped box corners,
    dyadic level not dividing the grid, cube outside a raster window)."""


class ResourceLimitError(CubeOscError):
    """Request would exceed a hard resource bound (cell count, pool size)."""


class InvariantViolation(CubeOscError):
    """A mathematical invariant the implementation certifies has failed.

    This is never expected in normal operation; it indicates a bug or
    numerical breakdown and is surfaced loudly rather than papered over.
    """


class BracketError(CubeOscError):
    """Bisection was requested without a sign-change bracket."""
