"""Exception types shared across the package."""

from __future__ import annotations


class QscaError(Exception):
    """Base class for all package-specific errors."""


class NullWordError(QscaError):
    """The all-zero window word was passed where a nonzero word is required."""


class StepDivergedError(QscaError):
    """A time step scanned past its safety bound without settling.

    Attributes:
        sites_scanned: number of sites visited before giving up.
        time_index: evolution step at which the divergence occurred,
            or None when raised from a bare step() call.
    """

    def __init__(self, sites_scanned: int, time_index: int | None = None):
        self.sites_scanned = sites_scanned
        self.time_index = time_index
        at = "" if time_index is None else f" at step {time_index}"
        super().__init__(
            f"update scan exceeded the safety bound after {sites_scanned} sites{at}"
        )


class RadiusError(QscaError):
    """Radius outside the supported range for the requested construction."""


class DimensionTooLarge(QscaError):
    """A dense-matrix construction would exceed the configured size limit."""


class ParseError(QscaError):
    """Malformed text input.

    Attributes:
        line_no: 1-based line number of the offending line, when known.
    """

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        where = "" if line_no is None else f"line {line_no}: "
        super().__init__(where + message)


class NotHermitian(QscaError):
    """A matrix expected to be Hermitian was not, within tolerance.

    Attributes:
        residual: max-norm of (H - H^dagger).
    """

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"matrix is not Hermitian (max residual {residual:.3e})")


class NotUnitary(QscaError):
    """A matrix expected to be unitary was not, within tolerance.

    Attributes:
        residual: max-norm of (U^dagger U - I).
    """

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"matrix is not unitary (max residual {residual:.3e})")
