# app/schemas/diagnostics.py
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, computed_field, model_validator


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNDETERMINED = "undetermined-at-cap"


class TaxonomyLabel(str, Enum):
    JOINTLY_CONTINUOUS = "JOINTLY_CONTINUOUS"
    BOUNDED_AND_SEPARATELY_NOT_JOINTLY = "BOUNDED_AND_SEPARATELY_NOT_JOINTLY"
    BOUNDED_NOT_SEPARATELY = "BOUNDED_NOT_SEPARATELY"
    SEPARATELY_NOT_BOUNDED = "SEPARATELY_NOT_BOUNDED"
    NEITHER = "NEITHER"
    OUTSIDE_CONTINUOUS_INTEGRABLE = "OUTSIDE_CONTINUOUS_INTEGRABLE"
    UNDETERMINED = "undetermined-at-cap"


class DiagnosticsRow(BaseModel):
    q: int
    A: float
    C: float
    beta: float
    amplitude: float = Field(..., description="A_q C_q")
    separate_ratio: float = Field(..., description="A_q C_q beta_q / sum_{r>=q} beta_r")


class BoundednessReport(BaseModel):
    Q: int
    sup_ratio: float
    sup_span: List[int]
    same_block_sup: float
    verdict: Verdict
    amplitudes: List[float]


class SeparateContinuityReport(BaseModel):
    Q: int
    ratios: List[float]
    numeric_ratios: List[float]
    consistent: bool
    verdict: Verdict


class JointContinuityReport(BaseModel):
    Q: int
    amplitudes: List[float]
    verdict: Verdict


class InequalityCheck(BaseModel):
    name: str
    checked: int = 0
    violations: List[Dict[str, Any]] = Field(default_factory=list)
    tightest_slack: Optional[float] = None
    tightest_span: Optional[List[int]] = None

    @computed_field
    @property
    def passed(self) -> bool:
        return not self.violations


class ProofInequalityReport(BaseModel):
    trials: int
    seed: int
    max_q: int
    checks: List[InequalityCheck]

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class DiagnosticsReport(BaseModel):
    config: Dict[str, Any]
    rows: List[DiagnosticsRow]
    sup_ratio: float
    same_block_sup: float
    continuity: Verdict
    integrability: Verdict
    bounded: Verdict
    separately_continuous: Verdict
    jointly_continuous: Verdict
    label: TaxonomyLabel
    proof_inequalities: Optional[ProofInequalityReport] = None

    @model_validator(mode='after')
    def validate_inclusions(self) -> "DiagnosticsReport":
        if self.jointly_continuous == Verdict.HOLDS and not (
            self.bounded == Verdict.HOLDS and self.separately_continuous == Verdict.HOLDS
        ):
            raise ValueError('Joint continuity forces boundedness and separate continuity')
        return self
