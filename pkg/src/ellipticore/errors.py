"""Exception hierarchy shared by all evaluation layers.

Each class carries the process exit code the command-line front end maps it to.
"""


class EllipticError(Exception):
    """Base class for every error raised by ellipticore."""

    exit_code = 1


class DomainError(EllipticError, ValueError):
    """An argument lies outside the domain of the function (e.g. Im tau <= 0)."""

    exit_code = 2


class PoleError(EllipticError, ArithmeticError):
    """Evaluation point coincides (numerically) with a pole or a zero divisor."""

    exit_code = 3


class TruncationError(EllipticError, ArithmeticError):
    """A series failed to meet its tolerance within the allowed number of terms.

    Attributes
    ----------
    partial : complex
        The partial sum reached when the term budget was exhausted.
    tail_estimate : float
        Magnitude estimate of the neglected tail.
    terms_used : int
    """

    exit_code = 4

    def __init__(self, message, partial=0j, tail_estimate=float("inf"), terms_used=0):
        super().__init__(message)
        self.partial = partial
        self.tail_estimate = tail_estimate
        self.terms_used = terms_used


class NormalizationError(DomainError):
    """A unimodular map is not in the normalized form an operation requires."""


class InvalidRepresentationError(DomainError):
    """A theta-constant representation (alpha, beta) = (0, 0) mod 2 was requested."""


class ResonanceError(PoleError):
    """A multiplication recursion divides by a theta value that vanishes."""


class IntegralityError(EllipticError, ArithmeticError):
    """An integer recurrence produced a non-integral entry (internal defect)."""
