"""Exception hierarchy."""


class GratingError(Exception):
    """Base class for all errors raised by gnfi."""


class InvalidFieldError(GratingError, ValueError):
    """Field samples are non-finite or have the wrong shape."""


class ParameterError(GratingError, ValueError):
    """A physical or numerical parameter is out of its admissible range."""


class ResonanceError(GratingError):
    """Some mode sits on (or numerically at) a Wood anomaly, beta_n = 0."""

    def __init__(self, mode, side, beta):
        self.mode = tuple(int(v) for v in mode)
        self.side = side
        self.beta = beta
        super().__init__(
            f"Wood anomaly at mode n={self.mode} ({side} medium): |beta_n| = {abs(beta):.3e}"
        )


class SmallDivisorError(GratingError):
    """A first-order transfer coefficient has a vanishing denominator."""

    def __init__(self, mode, which, value):
        self.mode = tuple(int(v) for v in mode)
        super().__init__(f"small divisor {which} = {abs(value):.3e} at mode n={self.mode}")


class UnrecoverableComponentError(GratingError):
    """The requested field component carries no usable information on the surface."""


class ConfigError(GratingError, ValueError):
    """Run configuration is malformed."""


class DumpFormatError(GratingError, ValueError):
    """A field dump file is corrupt or does not match the expected layout."""
