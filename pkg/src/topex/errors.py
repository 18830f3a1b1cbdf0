"""Exception types shared across the package."""


class TopexError(Exception):
    """Base class for all package-specific errors."""


class ParseError(TopexError):
    """A corpus or lexicon file could not be parsed. Carries the line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateReviewError(TopexError):
    """The same (entity_id, review_id) pair appeared twice."""


class FormatError(TopexError):
    """A binary file has a bad magic number or unsupported version."""


class TruncatedFileError(TopexError):
    """A binary file ended mid-record."""


class ValidationError(TopexError):
    """Loaded data violates an invariant (e.g. NaN/Inf payload)."""


class ShapeError(TopexError):
    """Array dimensions do not match the model or operation."""


class DegenerateSentenceError(TopexError):
    """A sentence pooled to the all-zero vector and cannot be L1-normalized."""


class TrainingError(TopexError):
    """Training aborted (e.g. non-finite gradient). Carries the step number."""

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)


class ConfigError(TopexError):
    """Invalid run configuration (bad values or mismatched dimensions)."""
