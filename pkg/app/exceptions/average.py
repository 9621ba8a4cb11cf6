from .base import AppException

class AverageError(AppException):
    """Base exception for integral and average evaluations."""
    pass

class UndefinedExtensionError(AverageError):
    """Raised at (1, 1) when the average has no separately continuous extension there."""
    def __init__(self, variant: str, verdict: str):
        super().__init__(
            message=f"Ave[f](1,1) is undefined for variant '{variant}': the separate-continuity criterion is '{verdict}'.",
            status_code=409,
        )
        self.variant = variant
        self.verdict = verdict

class InvalidPartitionError(AverageError):
    """Raised when a tagged partition is malformed."""
    def __init__(self, detail: str):
        super().__init__(message=f"Invalid tagged partition: {detail}", status_code=422)
