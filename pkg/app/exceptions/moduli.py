from .base import AppException

class ModuliError(AppException):
    """Base exception for concavity modulus computations."""
    pass

class SearchBudgetExceededError(ModuliError):
    """Raised when a brute-force search would exceed its budget."""
    def __init__(self, what: str, requested: int, limit: int):
        super().__init__(
            message=f"Search budget exceeded for {what}: requested {requested}, limit {limit}.",
            status_code=422,
        )
        self.requested = requested
        self.limit = limit
