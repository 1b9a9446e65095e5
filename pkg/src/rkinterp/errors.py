"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures to the
documented process exit status without a lookup table.
"""


class RKInterpError(Exception):
    exit_code = 1


class ConfigurationError(RKInterpError, ValueError):
    exit_code = 2


class DimensionError(ConfigurationError):
    def __init__(self, expected, given):
        super().__init__(f"expected {expected} coordinates, got {given}")
        self.expected = expected
        self.given = given


class DomainError(ConfigurationError):
    pass


class EmptySequenceError(ConfigurationError):
    pass


class UnsupportedSpaceError(ConfigurationError):
    pass


class UnsupportedExponentError(ConfigurationError):
    pass


class WrongMethodError(ConfigurationError):
    pass


class SaturationError(ConfigurationError):
    pass


class ResourceGuardError(ConfigurationError):
    pass


class SingularityError(RKInterpError, ArithmeticError):
    exit_code = 3


class DegenerateConfigurationError(RKInterpError, ArithmeticError):
    """Raised when a pairing or Gram matrix is numerically singular."""

    exit_code = 3

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class CalibrationError(RKInterpError):
    exit_code = 4

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []


class ReportIOError(RKInterpError, OSError):
    exit_code = 5
