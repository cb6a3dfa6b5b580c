"""Exception hierarchy shared by every module."""


class QGraphError(Exception):
    """Base class. ``category`` is the machine-readable tag printed by the CLI."""

    category = "error"


class ValidationError(QGraphError, ValueError):
    category = "validation"


class ParseError(QGraphError, ValueError):
    category = "parse"

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field


class ConsistencyError(QGraphError, RuntimeError):
    """Two independent constructions of the same object disagree."""

    category = "consistency"


class PoleAtK(QGraphError, ArithmeticError):
    """The vertex secular form is singular: k lies on the doubled-edge periodic set."""

    category = "pole"

    def __init__(self, k, message=None):
        super().__init__(message or f"vertex secular form has a pole at k={k!r}")
        self.k = k


class NonzeroPotential(QGraphError, ValueError):
    category = "potential"


class NotARoot(QGraphError, ValueError):
    category = "not-a-root"


class NotSpectrallyEquilateral(QGraphError, ValueError):
    category = "not-spectrally-equilateral"


class InconsistentCounterpart(QGraphError, ValueError):
    category = "inconsistent-counterpart"
