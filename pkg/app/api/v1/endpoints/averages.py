# app/api/v1/endpoints/averages.py
from typing import List

from fastapi import APIRouter

from app.api.v1.dependencies import get_average_service
from app.api.v1.schemas.average import AveRequest, BlowupRequest
from app.schemas.average import AverageSample, BlowupRow

router = APIRouter()


@router.post("/ave", response_model=AverageSample, summary="Evaluate Ave[f](s, t)")
def evaluate_average(request: AveRequest):
    """
    Exact average of f over [s, t], f(s) on the diagonal. At (1, 1) the
    value exists only when the averages are separately continuous; otherwise
    the response is 409.
    """
    return get_average_service(request.spec).ave(request.s, request.t)


@router.post("/blowup", response_model=List[BlowupRow], summary="Half-block witness table")
def blowup_table(request: BlowupRequest):
    return get_average_service(request.spec).blowup_rows(request.Q)
