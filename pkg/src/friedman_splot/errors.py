"""Exception types shared across the package."""

from __future__ import annotations


class FriedmanSplotError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FriedmanSplotError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConvergenceError(FriedmanSplotError, ArithmeticError):
    """An iterative numerical routine failed to reach its tolerance."""


class DegenerateError(FriedmanSplotError, ValueError):
    """The data carry no information for the requested statistic."""


class DataError(FriedmanSplotError, ValueError):
    """Input data could not be parsed or do not form a valid block design."""

    def __init__(self, message: str, line: int | None = None, column: str | None = None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class IncompleteDesignError(DataError):
    """Some (block, group) cells are missing from a long-format table."""

    def __init__(self, missing: list[tuple[str, str]]):
        self.missing = missing
        shown = ", ".join(f"({b}, {g})" for b, g in missing[:20])
        more = f" and {len(missing) - 20} more" if len(missing) > 20 else ""
        super().__init__(f"incomplete design, missing cells: {shown}{more}")
