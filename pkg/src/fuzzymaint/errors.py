"""Exception hierarchy.

The three base classes map onto CLI exit codes: ``DataError`` -> 2,
``ModelError`` -> 3, ``UndefinedMetric`` -> 4.
"""

from __future__ import annotations


class FuzzyMaintError(Exception):
    """Base class for all errors raised by this package."""


class DataError(FuzzyMaintError, ValueError):
    """Bad input data: unparsable files, negative metrics, missing values."""


class ModelError(FuzzyMaintError):
    """Misconfigured model or an inference that cannot produce a score."""


class NonFiniteInput(DataError):
    pass


class NegativeMetricValue(DataError):
    pass


# The metrics parser raises the same class; both names are public.
NegativeValue = NegativeMetricValue


class ParseError(DataError):
    def __init__(self, message: str, *, path: str | None = None,
                 line: int | None = None, column: str | None = None):
        where = [str(path)] if path else []
        if line is not None:
            where.append(f"line {line}")
        if column:
            where.append(f"column {column!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.path = path
        self.line = line
        self.column = column


class DuplicateServiceName(DataError):
    pass


DuplicateService = DuplicateServiceName


class MissingMetric(DataError):
    pass


class ZeroTotalServices(DataError):
    pass


class SchemaError(DataError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class TooFewValues(DataError):
    pass


class MissingMetricInCorpus(DataError):
    pass


class KeyMismatch(DataError):
    pass


class TiedDecision(DataError):
    pass


class InvariantViolation(ModelError, ValueError):
    pass


class NonMonotoneOverride(InvariantViolation):
    pass


class UnknownVariable(ModelError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument
        return str(self.args[0]) if self.args else ""


class UnknownLevel(UnknownVariable):
    pass


class NoRuleFired(ModelError):
    pass


class EmptyAggregate(ModelError):
    pass


class UndefinedMetric(FuzzyMaintError, ArithmeticError):
    pass
