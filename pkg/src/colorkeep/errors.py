"""Exception types shared across the package."""


class ColorKeepError(Exception):
    """Base class for every error this package raises on purpose.

    Pipeline runs annotate propagating errors with the name of the stage
    that raised them; outside a pipeline run ``stage`` stays None.
    """

    def __init__(self, *args):
        super().__init__(*args)
        self.stage: str | None = None


class ImageFormatError(ColorKeepError):
    """Malformed or unsupported image container data."""


class UnsupportedDepthError(ImageFormatError):
    """Sample depth other than 8 bits per channel."""


class TruncatedDataError(ColorKeepError):
    """Image payload ends before the declared amount of data."""


class DimensionError(ColorKeepError):
    """Zero-sized image or mismatched plane dimensions."""


class NumericError(ColorKeepError):
    """Non-finite values where finite ones are required."""


class EmptyImageError(ColorKeepError):
    """Statistics requested over zero pixels."""


class NotPositiveDefiniteError(ColorKeepError):
    """Cholesky pivot vanished: matrix is not positive definite."""


class NotPsdError(ColorKeepError):
    """Symmetric matrix has an eigenvalue too negative to clamp away."""


class SingularMatrixError(ColorKeepError):
    """Matrix inverse requested where an eigenvalue or pivot is zero."""


class DegenerateStatsError(ColorKeepError):
    """Covariance too degenerate for the requested map variant."""


class DegenerateLuminanceError(ColorKeepError):
    """Luminance spread is (near) zero, so linear matching is undefined."""


class ConfigError(ColorKeepError):
    """Invalid pipeline or styler configuration."""


class StylerError(ColorKeepError):
    """Base class for failures of the external styling stage."""


class StylerFailedError(StylerError):
    """External styler exited with a nonzero status."""

    def __init__(self, message, returncode=None, stdout=b"", stderr=b""):
        super().__init__(message)
        self.returncode = returncode
        self.stdout = stdout
        self.stderr = stderr


class StylerTimeoutError(StylerError):
    """External styler did not finish within the configured timeout."""
