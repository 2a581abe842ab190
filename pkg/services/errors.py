class MergeGameError(Exception):
    """Base class for every error raised by the decision engine."""


class ContractViolation(MergeGameError, ValueError):
    """A caller broke an operation's precondition."""


class DataFormatError(MergeGameError):
    """Input file does not match the expected schema."""

    def __init__(self, message: str, column: str | None = None, row: int | None = None):
        super().__init__(message)
        self.column = column
        self.row = row


class CalibrationError(MergeGameError):
    """A trajectory pair cannot be turned into an interaction sequence."""


class MappingError(MergeGameError):
    """The mapping model cannot be trained or used."""


class ConfigError(MergeGameError):
    """Configuration file or override is invalid."""


class StageError(MergeGameError):
    """Wraps a failure with the pipeline stage it happened in."""

    def __init__(self, stage: str, cause: Exception | str):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")
