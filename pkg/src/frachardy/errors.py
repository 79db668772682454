"""Exception types shared across the package."""


class FracHardyError(Exception):
    """Base class for all package errors."""


class DomainError(FracHardyError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(DomainError):
    """A function was evaluated at one of its poles."""


class NumeratorPole(PoleError):
    """A Gamma function in a numerator sits on a pole."""


class IndeterminatePole(PoleError):
    """Numerator and denominator poles coincide; the value is not determined."""


class PoleConfiguration(PoleError):
    """Parameters put an identity on a pole of one of its Gamma factors."""


class NoConvergence(FracHardyError, RuntimeError):
    """An iterative or adaptive procedure ran out of budget."""


class PolicyRejected(FracHardyError):
    """A truncation policy cannot certify the requested tail tolerance."""


class InternalInconsistency(FracHardyError, RuntimeError):
    """Two independent evaluation routes disagree beyond tolerance."""
