"""Error types raised by the control toolkit.

Everything derives from ValueError so callers that already catch
validation errors (pydantic's ValidationError included) keep working.
"""


class MLSPCError(ValueError):
    """Base error for the toolkit."""


class DataError(MLSPCError):
    """Input data cannot be used as given.

    `code` identifies the failure so the CLI and tests can tell
    a ragged row from an empty cell without parsing messages.
    """

    EMPTY_FILE = 'E_EMPTY_FILE'
    RAGGED_ROW = 'E_RAGGED_ROW'
    EMPTY_CELL = 'E_EMPTY_CELL'
    NON_FINITE = 'E_NON_FINITE'
    TYPE_CONFLICT = 'E_TYPE_CONFLICT'
    SCHEMA = 'E_SCHEMA'
    MISSING_FEATURE = 'E_MISSING_FEATURE'
    UNKNOWN_COLUMN = 'E_UNKNOWN_COLUMN'

    def __init__(self, code: str, message: str):
        super().__init__(f'[{code}] {message}')
        self.code = code


class MissingFeatureError(DataError):
    """A row or dataset lacks a feature that a slice or relation needs."""

    def __init__(self, feature: str):
        super().__init__(DataError.MISSING_FEATURE, f"feature '{feature}' is missing")
        self.feature = feature


class NotApplicableError(MLSPCError):
    """The statistic is undefined for this input."""


class DegenerateSampleError(MLSPCError):
    """Input has no variability where the statistic needs some."""


class UsageError(MLSPCError):
    """Command-line arguments are invalid."""
