"""Exception types raised across the package."""


class TokzipError(Exception):
    """Base class for all errors raised by this package."""


class ZeroRowError(TokzipError):
    """A key matrix row has (near-)zero norm and cannot be normalized."""

    def __init__(self, index, path=None):
        self.index = index
        self.path = path
        where = f" in {path}" if path else ""
        super().__init__(f"row {index} has zero norm{where}")


class DimensionMismatchError(TokzipError):
    """Tensor shapes disagree with each other or with the expected layout."""


class EmptyInputError(TokzipError):
    """An operation received an empty sequence where at least one value is required."""


class InsufficientSupportError(TokzipError):
    """Fewer strictly positive attention entries than requested samples."""

    def __init__(self, requested, available):
        self.requested = requested
        self.available = available
        super().__init__(
            f"cannot sample {requested} tokens from {available} positive-probability entries"
        )


class EmptyRetentionError(TokzipError):
    """Aggregation was asked to produce output for an empty retained set."""


class NeighborCountExceedsTokensError(TokzipError):
    """knn_k is too large for the number of tokens available as neighbors."""


class GlobalImageRejectedError(TokzipError):
    """compress_subimage was called on the uncompressed global image bundle."""


class MultipleGlobalImagesError(TokzipError):
    """A document may contain at most one global-image bundle."""


class EmptyCorpusError(TokzipError):
    """Statistics were requested over an empty result list."""


class ParseError(TokzipError):
    """A tensor file or manifest could not be parsed."""

    def __init__(self, message, path=None):
        self.path = path
        where = f"{path}: " if path else ""
        super().__init__(f"{where}{message}")


class NonFiniteValueError(TokzipError):
    """A loaded tensor contains NaN or infinity."""

    def __init__(self, path, index):
        self.path = path
        self.index = index
        super().__init__(f"{path}: non-finite value at flat index {index}")


class GridMismatchError(TokzipError):
    """grid_shape does not tile the token count."""


class InfeasibleSpecError(TokzipError):
    """A synthetic data spec cannot be realized (e.g. embedding dim too small)."""
