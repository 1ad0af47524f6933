"""Exception hierarchy shared by the library and the command line."""


class GlmOsError(Exception):
    """Base exception for all GLM-OS errors."""

    pass


class DataError(GlmOsError):
    """Raised when input data cannot be read or violates its schema."""

    pass


class EncodingError(GlmOsError):
    """Raised when a column cannot be encoded into at least two categories."""

    pass


class SpecError(GlmOsError):
    """Raised when a scaling specification is infeasible for its column."""

    pass


class ConfigError(GlmOsError):
    """Raised when a run configuration references unknown columns or options."""

    pass


class DegenerateTransformError(GlmOsError):
    """Raised when a quantification has zero weighted variance."""

    pass


class RankDeficientError(GlmOsError):
    """Raised when a design matrix does not have full column rank."""

    pass


class FoldError(GlmOsError):
    """Raised when folds cannot be assigned as requested."""

    pass


class ArtifactError(GlmOsError):
    """Raised when a model artifact is corrupt or has an unknown version."""

    pass


# Errors a user fixes by changing the input or the configuration
USAGE_ERRORS: tuple[type[GlmOsError], ...] = (
    ConfigError,
    DataError,
    EncodingError,
    FoldError,
    SpecError,
)
