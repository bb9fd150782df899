"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Operands live in different matrix dimensions."""


class NonUnitaryMatrixError(ValueError):
    """A matrix failed the unitarity or determinant-one check."""


class GateSetFormatError(ValueError):
    """A gate-set document is syntactically or structurally invalid."""


class NetSizeExceededError(RuntimeError):
    """Net enumeration hit its entry budget.

    ``count`` is the number of entries built before giving up; ``partial``
    holds the still-usable net of everything enumerated so far.
    """

    def __init__(self, count, partial=None):
        super().__init__(f"net entry budget exceeded after {count} entries")
        self.count = count
        self.partial = partial


class CompilationBudgetError(RuntimeError):
    """Compilation ran out of budget; carries the best result found so far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
