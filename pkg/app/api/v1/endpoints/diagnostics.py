# app/api/v1/endpoints/diagnostics.py
from fastapi import APIRouter

from app.api.v1.dependencies import get_diagnostics_service
from app.api.v1.schemas.diagnostics import ReportRequest
from app.schemas.diagnostics import DiagnosticsReport

router = APIRouter()


@router.post("/report", response_model=DiagnosticsReport, summary="Classify a construction")
def diagnostics_report(request: ReportRequest):
    """
    Boundedness, separate and joint continuity verdicts with the per-q table.
    With `trials` set, the seeded span inequality suite is included.
    """
    service = get_diagnostics_service(request.spec)
    report = service.build_report(request.Q)
    if request.trials:
        proof = service.verify_proof_inequalities(request.trials, request.seed, max_q=request.max_q)
        report = report.model_copy(update={"proof_inequalities": proof})
    return report
