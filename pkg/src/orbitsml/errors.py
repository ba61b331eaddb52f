"""Exception types shared across the library.

Every failure mode a caller may want to catch has its own class; pipeline
code distinguishes retryable failures (Inconclusive, PrecisionExhausted)
from hard aborts (ValuationBoundViolated, InternalContradiction).
"""


class OrbitSMLError(Exception):
    """Base class for all library errors."""


class ArityMismatch(OrbitSMLError):
    """Polynomial maps or points of incompatible dimension."""


class NotInverse(OrbitSMLError):
    """Claimed inverse map does not compose to the identity."""


class NonConstantJacobian(OrbitSMLError):
    """Jacobian determinant of the forward map is not constant."""


class ZeroJacobian(OrbitSMLError):
    """Jacobian determinant is the zero constant."""


class IrreducibilityUncertain(OrbitSMLError):
    """The irreducibility screen could not certify the minimal polynomial."""


class PrimeUnsupported(OrbitSMLError):
    """Context construction rejected the prime (p < 5, or not prime)."""


class DenominatorNotUnit(OrbitSMLError):
    """A rational with p in the denominator cannot enter Z_p."""


class NotASimpleRoot(OrbitSMLError):
    """Hensel lifting requires f(r0) = 0 and f'(r0) != 0 mod p."""


class NonUnitInverse(OrbitSMLError):
    """Inversion of a non-unit residue."""


class NoPrimeInRange(OrbitSMLError):
    """No prime below max_prime passed every embedding check.

    A qualifying prime always exists further out; raise max_prime and retry.
    """


class ValuationBoundViolated(OrbitSMLError):
    """A Mahler coefficient broke the certified valuation growth law.

    This signals a hypothesis failure upstream (wrong period certificate or
    an unsupported prime slipped through) and aborts the pipeline.
    """

    def __init__(self, k: int, got, need: int):
        self.k = k
        self.got = got
        self.need = need
        super().__init__(
            f"Mahler coefficient {k} has valuation {got}, below the certified "
            f"lower bound {need}"
        )


class PrecisionExhausted(OrbitSMLError):
    """Working precision N too small for a requested operation."""


class Inconclusive(OrbitSMLError):
    """Truncated data cannot separate the verdicts; raise K or N and retry."""


class InternalContradiction(OrbitSMLError):
    """Exact arithmetic contradicted a precision-limited verdict.

    Indicates a bug or a precision misconfiguration; never silently ignored.
    """


class DegenerateRecurrence(OrbitSMLError):
    """Trailing recurrence coefficient is zero (companion map not invertible)."""


class JacobianNotInvertible(OrbitSMLError):
    """Jacobian singular mod p; impossible for a validated automorphism."""


class ParseError(OrbitSMLError):
    """Instance file rejected, annotated with a position where possible."""

    def __init__(self, message: str, line=None, col=None, path=None):
        self.line = line
        self.col = col
        self.path = path
        where = ""
        if line is not None:
            where = f" (line {line}, column {col})"
        elif path:
            where = f" (at {path})"
        super().__init__(message + where)
