from .base import AppException

class LpSpaceError(AppException):
    """Base exception for sequence-space arithmetic errors."""
    pass

class InvalidExponentError(LpSpaceError):
    """Raised when an exponent p lies outside (0, 1]."""
    def __init__(self, p: float):
        super().__init__(message=f"Exponent p must satisfy 0 < p <= 1, got {p}.", status_code=422)
        self.p = p

