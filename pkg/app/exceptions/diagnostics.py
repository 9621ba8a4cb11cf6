from typing import List

from .base import AppException, EXIT_VERIFICATION_FAILED

class DiagnosticsError(AppException):
    """Base exception for criterion checks."""
    pass

class VerificationFailedError(DiagnosticsError):
    """Raised when a proof inequality or a consistency check is violated."""
    def __init__(self, failures: List[str]):
        shown = "; ".join(failures[:5])
        more = f" (+{len(failures) - 5} more)" if len(failures) > 5 else ""
        super().__init__(
            message=f"Verification failed: {shown}{more}",
            status_code=500,
            exit_code=EXIT_VERIFICATION_FAILED,
        )
        self.failures = failures
