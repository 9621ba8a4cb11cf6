# app/api/v1/schemas/diagnostics.py
from typing import Optional

from pydantic import BaseModel, Field

from app.core.config import settings
from app.schemas.construction import ConstructionSpec


class ReportRequest(BaseModel):
    spec: ConstructionSpec = Field(default_factory=ConstructionSpec)
    Q: int = Field(20, ge=1)
    trials: Optional[int] = Field(None, ge=1, le=100_000)
    seed: int = 0
    max_q: int = Field(settings.VERIFY_MAX_Q, ge=1)
