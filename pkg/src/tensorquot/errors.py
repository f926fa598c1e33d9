"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`TensorQuotError`; the CLI maps these to exit code 1.
"""


class TensorQuotError(Exception):
    pass


class ArityError(TensorQuotError, ValueError):
    pass


class DivisionByZero(TensorQuotError, ZeroDivisionError):
    pass


class InvalidEmbeddingError(TensorQuotError, ValueError):
    pass


class ConductorError(TensorQuotError, ValueError):
    """Conductor exceeds the configured cap."""


class UndefinedGcdError(TensorQuotError, ValueError):
    pass


class ZeroInputError(TensorQuotError, ValueError):
    pass


class InvalidComponentError(TensorQuotError, ValueError):
    pass


class OrderBoundError(TensorQuotError):
    pass


class InvalidGeneratorError(TensorQuotError, ValueError):
    pass


class UnknownFamilyError(TensorQuotError, ValueError):
    pass


class UnsupportedQuotientError(TensorQuotError):
    pass


class NotInvariantError(TensorQuotError, ValueError):
    pass


class IncompleteGeneratorsError(TensorQuotError, ValueError):
    pass


class InternalIncompletenessError(TensorQuotError, RuntimeError):
    pass


class ChartError(TensorQuotError, ValueError):
    pass


class SingularChartError(ChartError):
    pass


class SingularComponentError(TensorQuotError, ValueError):
    pass


class InvalidDivisorError(TensorQuotError, ValueError):
    pass


class ZeroTensorError(TensorQuotError, ValueError):
    pass


class NotSymmetricError(TensorQuotError, ValueError):
    pass


class PreconditionError(TensorQuotError, ValueError):
    """An input violates a stated precondition (e.g. a non-regular field)."""


class ParseError(TensorQuotError, ValueError):
    """Syntax error in a literal; carries a 1-based line/column."""

    def __init__(self, message, text="", pos=0):
        self.text = text
        self.pos = pos
        before = text[:pos]
        self.line = before.count("\n") + 1
        self.column = pos - (before.rfind("\n") + 1) + 1
        super().__init__(f"{message} (line {self.line}, column {self.column})")
