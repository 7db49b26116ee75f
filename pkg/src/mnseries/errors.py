"""Exception hierarchy for the series engine.

Every error carries a stable ``code`` string so the CLI can map failures to
deterministic diagnostics and exit statuses: mathematical refusals exit 1,
usage/parse problems exit 2.
"""


class MNError(Exception):
    """Base class for all engine errors."""

    code = "error"
    exit_status = 1


class SpecMismatch(MNError):
    code = "spec-mismatch"


class SingularTwist(MNError):
    code = "singular-twist"


class ZeroDivisor(MNError):
    code = "zero-divisor"


class ZeroSeries(MNError):
    code = "zero-series"


class NonpositiveOrder(MNError):
    code = "nonpositive-order"


class BadInitialTerm(MNError):
    code = "bad-initial-term"


class OutOfPrecision(MNError):
    code = "out-of-precision"


class RefusedSingular(MNError):
    """Change of variables refused: Jacobian number 0 and non-polynomial Phi."""

    code = "refused-singular"


class ExpansionFailure(MNError):
    """Phi does not expand in the target field (composition gate)."""

    code = "expansion-failure"


class BadNormalization(MNError):
    """Lagrange inversion input whose linear part is not the identity."""

    code = "bad-normalization"


class UsageError(MNError):
    """Problems with user-supplied text: unknown names, malformed input."""

    code = "usage"
    exit_status = 2


class UnknownVariable(UsageError):
    code = "unknown-variable"


class UnboundVariable(UsageError):
    code = "unbound-variable"


class ParseError(UsageError):
    """Syntax error in an expression, with 0-based position."""

    code = "syntax"

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NonIntegerExponent(ParseError):
    code = "non-integer-exponent"
