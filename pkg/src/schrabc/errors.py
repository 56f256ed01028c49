"""Exception hierarchy.

Errors split into two families so the CLI can map them to exit codes:
``ConfigError`` subclasses describe bad inputs, ``NumericalError``
subclasses describe a violated numerical invariant.
"""


class SchrAbcError(Exception):
    """Base class for all package errors."""


class ConfigError(SchrAbcError, ValueError):
    """Invalid user input (bounds, sizes, profiles, config files)."""


class NumericalError(SchrAbcError, ArithmeticError):
    """A numerical invariant was violated during a computation."""


# numerics
class NotHermitian(NumericalError):
    pass


class NotPSD(NumericalError):
    pass


class KrylovBreakdown(NumericalError):
    pass


class UnstableStep(NumericalError):
    pass


# discretization / profiles
class BadBounds(ConfigError):
    pass


class ProfileOutOfDomain(ConfigError):
    pass


class PositiveImagPotential(ConfigError):
    pass


# dtn
class IncommensurateGrids(ConfigError):
    pass


class OmegaNotInsideD(ConfigError):
    pass


class EmptyExterior(ConfigError):
    pass


class SingularShift(NumericalError):
    pass


# schrodingerization
class BadInterval(ConfigError):
    pass


class OddM(ConfigError):
    pass


class BasisMismatch(SchrAbcError, ValueError):
    pass


# reference / analysis
class MassReachedFrame(NumericalError):
    pass


class DegenerateLog(ConfigError):
    pass


class ZeroReference(SchrAbcError, ValueError):
    pass


class ConfigInvalid(ConfigError):
    """Config file failed validation; ``field`` is a dotted path like ``dtn.D_bounds``."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
