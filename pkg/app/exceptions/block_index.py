from .base import AppException

class BlockIndexError(AppException):
    """Base exception for flat index / block coordinate conversions."""
    pass

class InvalidBlockIndexError(BlockIndexError):
    """Raised when a flat index k is not a positive integer."""
    def __init__(self, k: int):
        super().__init__(message=f"Flat index k must be a positive integer, got {k}.", status_code=422)
        self.k = k

class InvalidBlockCoordinatesError(BlockIndexError):
    """Raised when (q, j, eps) does not describe a tent of the construction."""
    def __init__(self, q: int, j: int, eps: int = 1):
        super().__init__(
            message=f"Invalid block coordinates (q={q}, j={j}, eps={eps}): need q >= 1, 1 <= j <= q and eps in {{-1, +1}}.",
            status_code=422,
        )
        self.q = q
        self.j = j
        self.eps = eps
