"""Exception types raised across the package."""


class FrobscopeError(Exception):
    """Base class for all package errors."""


class NotPrime(FrobscopeError, ValueError):
    pass


class CapExceeded(FrobscopeError, ValueError):
    pass


class TrivialCharacter(FrobscopeError, ValueError):
    pass


class ZeroParameter(FrobscopeError, ValueError):
    pass


class BadCharacteristic(FrobscopeError, ValueError):
    pass


class NoCubicCharacters(FrobscopeError, ValueError):
    pass


class UnexpectedProduct(FrobscopeError, ArithmeticError):
    pass


class OutOfRange(FrobscopeError, ValueError):
    """A normalized sum exceeded its Weil bound by more than the tolerance."""


class UnsupportedType(FrobscopeError, ValueError):
    pass


class NonDominant(FrobscopeError, ValueError):
    pass


class QuadratureFailure(FrobscopeError, ArithmeticError):
    pass


class UnsupportedRank(FrobscopeError, ValueError):
    pass


class NotSmallBox(FrobscopeError, ValueError):
    pass


class MissingCharSum(FrobscopeError, KeyError):
    pass


class CertificateViolation(FrobscopeError, AssertionError):
    """Observed deviation exceeded the constructive Erdos-Turan bound."""


class DegenerateInput(FrobscopeError, ValueError):
    pass
