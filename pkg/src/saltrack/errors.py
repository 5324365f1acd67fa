"""Exception types shared across the package."""


class DecodeError(ValueError):
    """Raised when an image payload cannot be decoded."""


class InvalidBoxError(ValueError):
    """Raised when a bounding box degenerates (non-positive size after rounding)."""


class InvalidInputError(ValueError):
    """Raised when an input violates an operation's preconditions."""


class ProviderUnavailableError(RuntimeError):
    """Raised when a saliency provider cannot serve a request (e.g. missing file)."""


class DatasetError(ValueError):
    """Raised when a sequence or dataset directory is malformed."""
