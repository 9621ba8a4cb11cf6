# app/main.py
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from app.core.config import settings
from app.core.logging import configure_logging

from app.api.v1.endpoints import averages, constructions, diagnostics

from app.exceptions.base import AppException, ArtifactWriteError, ConfigurationError
from app.exceptions.average import InvalidPartitionError, UndefinedExtensionError
from app.exceptions.construction import (
    CapExceededError, InadmissibleExponentError, InvalidConstructionError, OutOfDomainError
)
from app.exceptions.diagnostics import VerificationFailedError
from app.exceptions.moduli import SearchBudgetExceededError

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Handles application startup and shutdown events."""
    configure_logging()
    logger.info("Starting up %s (defaults: p=%s, variant=%s, q_cap=%d)",
                settings.PROJECT_NAME, settings.DEFAULT_P, settings.DEFAULT_VARIANT, settings.DEFAULT_Q_CAP)
    yield
    logger.info("Shutdown complete.")


app = FastAPI(
    title=settings.PROJECT_NAME,
    openapi_url=f"{settings.API_V1_STR}/openapi.json",
    lifespan=lifespan
)


@app.exception_handler(AppException)
async def app_exception_handler(request: Request, exc: AppException):
    status_code = exc.status_code
    if isinstance(exc, UndefinedExtensionError): status_code = status.HTTP_409_CONFLICT
    elif isinstance(exc, (InvalidConstructionError, InadmissibleExponentError, OutOfDomainError,
                          CapExceededError, SearchBudgetExceededError, InvalidPartitionError,
                          ConfigurationError)):
        status_code = status.HTTP_422_UNPROCESSABLE_ENTITY
    elif isinstance(exc, (VerificationFailedError, ArtifactWriteError)):
        status_code = status.HTTP_500_INTERNAL_SERVER_ERROR
    return JSONResponse(status_code=status_code, content={"detail": exc.message})


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={"detail": [{"loc": list(e["loc"]), "msg": e["msg"]} for e in exc.errors()]},
    )


@app.exception_handler(ValidationError)
async def pydantic_validation_exception_handler(request: Request, exc: ValidationError):
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={"detail": [{"loc": list(e["loc"]), "msg": e["msg"]} for e in exc.errors()]},
    )


@app.exception_handler(Exception)
async def generic_exception_handler(request: Request, exc: Exception):
    logger.exception("Unhandled exception: %s - %s", type(exc).__name__, exc)
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content={"detail": "An unexpected internal server error occurred."},
    )


API_PREFIX = settings.API_V1_STR

app.include_router(constructions.router, prefix=f"{API_PREFIX}/constructions", tags=["Constructions"])
app.include_router(averages.router, prefix=f"{API_PREFIX}/averages", tags=["Averages"])
app.include_router(diagnostics.router, prefix=f"{API_PREFIX}/diagnostics", tags=["Diagnostics"])


@app.get("/", tags=["Root"])
async def read_root():
    return {
        "message": f"Welcome to {settings.PROJECT_NAME}",
        "variants": ["thm13", "thm14", "thm15", "custom"],
        "defaults": {"p": settings.DEFAULT_P, "variant": settings.DEFAULT_VARIANT, "q_cap": settings.DEFAULT_Q_CAP},
    }


if __name__ == "__main__":
    import uvicorn
    host = settings.SERVER_HOST
    port = settings.SERVER_PORT
    logger.info("Starting Uvicorn server on %s:%d", host, port)
    uvicorn.run(app, host=host, port=port)
