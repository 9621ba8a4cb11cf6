# app/api/v1/dependencies.py
import functools

from app.schemas.construction import ConstructionSpec
from app.services.average import AverageService
from app.services.construction import ConstructionService
from app.services.diagnostics import DiagnosticsService


@functools.lru_cache(maxsize=32)
def _construction_for(spec_json: str) -> ConstructionService:
    return ConstructionService(ConstructionSpec.model_validate_json(spec_json))


def get_construction_service(spec: ConstructionSpec) -> ConstructionService:
    """One service (and its per-q memo tables) per distinct spec."""
    return _construction_for(spec.model_dump_json())


def get_average_service(spec: ConstructionSpec) -> AverageService:
    return AverageService(get_construction_service(spec))


def get_diagnostics_service(spec: ConstructionSpec) -> DiagnosticsService:
    return DiagnosticsService(get_construction_service(spec))
