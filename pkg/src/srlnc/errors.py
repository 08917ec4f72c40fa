"""Exception hierarchy shared by all srlnc modules."""


class SrlncError(Exception):
    """Base class for every error raised by this package."""


class FieldMismatchError(SrlncError, ValueError):
    """Operands belong to different finite fields."""


class DimensionError(SrlncError, ValueError):
    """Shapes of operands do not agree."""


class SingularMatrixError(SrlncError, ValueError):
    """Matrix is not invertible."""


class NotFullRankError(SrlncError, ValueError):
    """Operation needs a full-row-rank matrix (or a full-rank decoder)."""


class BudgetExceededError(SrlncError):
    """An exhaustive enumeration would exceed the configured budget."""

    def __init__(self, required: int, budget: int, what: str = "matrices"):
        self.required = required
        self.budget = budget
        super().__init__(
            f"enumeration needs {required} {what}, budget is {budget}"
        )


class PoleError(SrlncError, ZeroDivisionError):
    """A rational function was evaluated at a root of its denominator."""


class CoincidentValuesError(SrlncError, ValueError):
    """Partial-fraction form needs pairwise distinct values."""
