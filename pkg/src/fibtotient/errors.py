"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a mathematical precondition."""


class CapacityError(RuntimeError):
    """An input exceeds a configured size limit."""


class BudgetError(RuntimeError):
    """An iteration or work budget was exhausted before completion."""


class TableError(ValueError):
    """A factor table file is malformed or inconsistent."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")
