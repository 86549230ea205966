"""Exception types shared across the package."""


class LoclabError(Exception):
    """Base class for all package errors."""


class FieldMismatch(LoclabError):
    """Operands belong to different fields."""


class DivideByZero(LoclabError):
    """Division or inversion of the zero element."""


class ShapeError(LoclabError):
    """Matrix dimensions are incompatible with the operation."""


class NotFullRank(LoclabError):
    """A matrix that must be full rank is rank deficient."""


class NotInSpan(LoclabError):
    """Column space containment required by the quotient does not hold."""


class RankError(LoclabError):
    """Requested rank is infeasible for the given shape."""


class DomainError(LoclabError):
    """Arguments outside the mathematical domain of the operation."""


class ExactKernelUnavailable(LoclabError):
    """No closed form and the support is too large to enumerate."""


class TooLarge(LoclabError):
    """Instance exceeds the exact-enumeration guard."""


class NotConstructible(LoclabError):
    """Requested code parameters admit no known construction."""


class RequiresRegular(LoclabError):
    """Operation is defined only for regular rank distributions."""


class ConfigError(LoclabError):
    """Invalid configuration file.  Carries the path of the offending key."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class UsageError(LoclabError):
    """Invalid command-line usage."""


class InternalError(LoclabError):
    """A state the channel model makes impossible was reached."""
