class TimeLotteryError(Exception):
    """Base class for every error raised by timelottery."""


class ValidationError(TimeLotteryError, ValueError):
    """
    An input or precondition was violated.

    Dataset errors carry the 1-based data row and the column name so the
    message can point at the offending cell.
    """

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        if row is not None or column is not None:
            location = ", ".join(
                part
                for part in (
                    f"row {row}" if row is not None else "",
                    f"column '{column}'" if column is not None else "",
                )
                if part
            )
            message = f"{message} ({location})"
        super().__init__(message)


class DegenerateOrderingError(ValidationError):
    """The outer lotteries of a continuity triple are indifferent."""


class DegenerateRegressionError(ValidationError):
    """All regressor values coincide, so the slope is undefined."""


class EmptyIntervalError(ValidationError):
    """A degenerate lottery has no disagreement interval."""
