# app/api/v1/schemas/average.py

from pydantic import BaseModel, Field

from app.schemas.construction import ConstructionSpec


class AveRequest(BaseModel):
    spec: ConstructionSpec = Field(default_factory=ConstructionSpec)
    s: float = Field(..., ge=0.0, le=1.0)
    t: float = Field(..., ge=0.0, le=1.0)


class BlowupRequest(BaseModel):
    spec: ConstructionSpec = Field(default_factory=ConstructionSpec)
    Q: int = Field(25, ge=1)
