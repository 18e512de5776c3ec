"""
Exception types for gfcodebook.

Parameter problems are ValueErrors so callers that only know the standard
library still catch them; integrity failures indicate a bug in the field
tower or a corrupted file and are RuntimeErrors.
"""


class CodebookError(Exception):
    """Base class for all gfcodebook errors."""


class ParameterError(CodebookError, ValueError):
    """Invalid parameters or arguments (non-prime p, p | s, zero argument...)."""


class BudgetExceededError(ParameterError):
    """The requested enumeration exceeds the configured budget."""

    def __init__(self, what, size, budget):
        self.what = what
        self.size = size
        self.budget = budget
        super().__init__(f"{what} needs {size} elements, budget is {budget}")


class IntegrityError(CodebookError, RuntimeError):
    """A computed quantity contradicts a proven identity or a stored digest."""
