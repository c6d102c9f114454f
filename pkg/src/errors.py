"""Error categories raised across the package.

Validation failures subclass ValueError so callers that already catch
ValueError keep working; the CLI maps each category to its own exit code.
"""


class InvalidRangeError(ValueError):
    """Axis or parameter range is empty or inverted."""


class ProfileError(ValueError):
    """Substance profile or mixture definition is unusable."""


class SignalLengthError(ValueError):
    """Signal too short (or of the wrong parity) for the requested transform."""


class ShapeMismatchError(ValueError):
    """Array shapes do not chain or do not match the model configuration."""


class DegenerateLabelError(ValueError):
    """A label has no positives or no negatives, so ROC is undefined."""


class DatasetError(ValueError):
    """Dataset is missing classes, items or files."""


class ConfigError(ValueError):
    """Experiment configuration is invalid; message names the field path."""


class DivergenceError(ArithmeticError):
    """Training produced a non-finite loss."""


class TensorFormatError(ValueError):
    """Tensor file could not be decoded."""


class BadMagicError(TensorFormatError):
    """Tensor file does not start with the expected magic bytes."""


class TruncatedTensorError(TensorFormatError):
    """Tensor file ends before its header or payload is complete."""


class TensorDimsError(TensorFormatError):
    """Tensor rank or dimensions exceed the supported limits."""


class UnsupportedVersionError(TensorFormatError):
    """Tensor or checkpoint format version is not understood."""


class CheckpointError(ValueError):
    """Checkpoint file is malformed or does not match its configuration."""


class ZeroSignalError(ValueError):
    """Signal has zero power, so an SNR cannot be defined."""
