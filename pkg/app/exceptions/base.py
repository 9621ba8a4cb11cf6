from typing import Optional

# Process exit codes shared by every command
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_VERIFICATION_FAILED = 3
EXIT_IO_ERROR = 4


class AppException(Exception):
    """Base class for custom application exceptions."""
    def __init__(self, message: str, status_code: int = 400, exit_code: int = EXIT_CONFIG_ERROR):
        self.message = message
        self.status_code = status_code
        self.exit_code = exit_code
        super().__init__(message)

class ConfigurationError(AppException):
    """Raised when a run configuration cannot be resolved."""
    def __init__(self, detail: str, source: Optional[str] = None):
        message = f"Invalid configuration: {detail}"
        if source:
            message += f" (from {source})"
        super().__init__(message, status_code=422)
        self.source = source

class ArtifactWriteError(AppException):
    """Raised when an output artifact cannot be written."""
    def __init__(self, path: str, reason: str):
        super().__init__(f"Could not write artifact '{path}': {reason}", status_code=500, exit_code=EXIT_IO_ERROR)
        self.path = path
