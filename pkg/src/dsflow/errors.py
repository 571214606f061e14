"""Exception hierarchy shared by every dsflow module."""


class DsflowError(Exception):
    """Base class for all dsflow errors."""


class DomainError(DsflowError, ValueError):
    """Argument outside the domain of a warp or profile function."""


class ArgumentError(DsflowError, ValueError):
    """Index or option outside its admissible set."""


class RangeError(DsflowError, ValueError):
    """Value not attained by a profile on the configured bracket."""


class SingularQuotientError(DsflowError, ArithmeticError):
    """Denominator of a curvature quotient vanished."""


class ConeViolationError(DsflowError):
    """Curvature tuple left the admissible cone."""


class SpacelikeError(DsflowError):
    """Graph is not spacelike at some nodes.

    ``nodes`` lists the offending node indices.
    """

    def __init__(self, message, nodes=()):
        super().__init__(message)
        self.nodes = list(nodes)


class NumericsError(DsflowError, FloatingPointError):
    """Non-finite values appeared during a computation."""


class ConstructionError(DsflowError, ValueError):
    """Initial data failed validation."""

    def __init__(self, message, condition=None, node=None):
        super().__init__(message)
        self.condition = condition
        self.node = node


class ConfigError(DsflowError, ValueError):
    """Inconsistent or malformed configuration."""
