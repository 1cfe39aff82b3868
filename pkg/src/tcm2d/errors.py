"""Exception types shared across the package."""


class TcmError(Exception):
    """Base class for all package-specific errors."""


class BadParams(TcmError):
    """Invalid parameters (grid, preset, band, step sizes, ...)."""


class NonZeroMean(TcmError):
    """Operator requiring a mean-zero field received one with nonzero mean.

    Inverting the Laplacian on the torus is ill-posed on the constant mode;
    the tolerance separates conserved-mean roundoff drift from user error.
    """


class EpsOutOfRange(TcmError):
    """Regularization parameter outside the admissible range of the formula."""


class CflViolation(TcmError):
    """Advective CFL guard tripped; the step was rejected."""

    def __init__(self, ratio, limit):
        self.ratio = float(ratio)
        self.limit = float(limit)
        super().__init__(
            f"advective CFL ratio {self.ratio:.6g} exceeds limit {self.limit:.6g}"
        )


class BadWindow(TcmError):
    """Snapshot window is unusable (wrong length or unequal spacing)."""


class BadSeries(TcmError):
    """A sampled-series invariant is violated; reports the first bad index."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message if index is None else f"{message} (index {index})")


class Infeasible(TcmError):
    """No positive constant can satisfy the inequality on these samples."""


class ConfigMismatch(TcmError):
    """Sweep members differ in something other than the swept parameter."""


class ConfigParseError(TcmError):
    """Malformed or invalid configuration input."""


class ChecksumMismatch(TcmError):
    """A manifested file is missing or does not match its recorded checksum."""


class EmptyTrajectory(TcmError):
    """Diagnostics requested on a trajectory with no records."""
