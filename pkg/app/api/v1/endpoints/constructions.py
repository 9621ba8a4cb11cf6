# app/api/v1/endpoints/constructions.py
from fastapi import APIRouter

from app.api.v1.dependencies import get_construction_service
from app.schemas.construction import ConstructionSpec, ConstructionSummary

router = APIRouter()


@router.post(
    "/resolve",
    response_model=ConstructionSummary,
    summary="Resolve a construction and summarise its coefficients"
)
def resolve_construction(spec: ConstructionSpec):
    """
    Validates the variant parameters (for instance b > 2(1-p)/p for thm13),
    fills in the derived coefficient rules and reports sum(beta) together with
    the integrability series.
    """
    return get_construction_service(spec).summary()
