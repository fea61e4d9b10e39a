"""Exception types raised by the chain, walk, and simulator constructors."""


class QhtError(Exception):
    """Base class for all package-specific errors."""


class NotStochastic(QhtError):
    """Matrix rows do not sum to one or contain negative entries."""


class NotErgodic(QhtError):
    """Transition matrix is reducible or periodic."""


class Disconnected(QhtError):
    """Weight matrix support is not connected."""


class NonReversible(QhtError):
    """Chain violates detailed balance where reversibility is required."""


class NegativeEigenvalue(QhtError):
    """Chain has an eigenvalue below zero; caller should lazify first."""


class NonPositiveEigenvalue(QhtError):
    """Chain spectrum extends below the tolerance floor for quantum ops."""


class SingularSystem(QhtError):
    """Linear solve for the hitting time broke down numerically."""


class NoConvergence(QhtError):
    """Iteration cap reached without meeting the stopping condition."""


class DegeneratePlusOneSpace(QhtError):
    """Walk operator has no effectively unique fixed vector."""


class NoUniqueFixedVector(QhtError):
    """Fixed-vector extraction for the classical analogue is ambiguous."""


class ZeroMass(QhtError):
    """A state block of the fixed vector has zero weight."""


class BracketFailure(QhtError):
    """Root bracketing between secular poles failed."""


class SpanViolation(QhtError):
    """Fixed vector is not contained in the span of the target family."""


class MinusOnePresent(QhtError):
    """Target state overlaps a -1 eigenvector of the walk operator."""


class PhaseRangeViolation(QhtError):
    """State carries weight on eigenphases outside the allowed range."""


class TooLarge(QhtError):
    """Requested dense simulation exceeds the size ceiling."""
