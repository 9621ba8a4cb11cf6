# app/exceptions/construction.py
from .base import AppException

class ConstructionError(AppException):
    """Base exception for tent-sum construction errors."""
    pass

class InvalidConstructionError(ConstructionError, ValueError):
    """Raised when a variant and its parameters do not fit together."""
    def __init__(self, detail: str):
        super().__init__(message=f"Invalid construction: {detail}", status_code=422)

class InadmissibleExponentError(ConstructionError, ValueError):
    """Raised when the telescoping exponent b violates b > 2(1-p)/p."""
    def __init__(self, b: float, p: float):
        bound = 2.0 * (1.0 - p) / p
        super().__init__(
            message=f"Exponent b={b} is inadmissible for p={p}: the bounded/separately continuous construction needs b > 2(1-p)/p = {bound}.",
            status_code=422,
        )
        self.b = b
        self.p = p

class OutOfDomainError(ConstructionError):
    """Raised when a point lies outside the domain of an evaluator."""
    def __init__(self, name: str, value: float, domain: str):
        super().__init__(message=f"{name}={value} lies outside {domain}.", status_code=422)
        self.value = value

class CapExceededError(ConstructionError):
    """Raised when an evaluation needs a block beyond the configured q_cap."""
    def __init__(self, q: int, q_cap: int, operation: str = ""):
        message = f"Block q={q} exceeds q_cap={q_cap}."
        if operation:
            message += f" The operation '{operation}' needs a larger --q-cap."
        super().__init__(message=message, status_code=422)
        self.q = q
        self.q_cap = q_cap
