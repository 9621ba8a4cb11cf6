import math
from typing import List

from pydantic import BaseModel, ConfigDict, PositiveInt, model_validator

from .lp_space import PExponent, SparseVector


class WitnessFamily(BaseModel):
    """Weights mu_{q,j} and unit vectors y_{q,j} realising the concavity modulus C_q."""
    model_config = ConfigDict(frozen=True)

    q: PositiveInt
    p: PExponent
    weights: List[float]
    vectors: List[SparseVector]
    combination_norm: float

    @model_validator(mode='after')
    def validate_family(self) -> "WitnessFamily":
        if len(self.weights) != self.q or len(self.vectors) != self.q:
            raise ValueError(f'A witness family for q={self.q} needs exactly q weights and q vectors')
        if any(w <= 0.0 for w in self.weights):
            raise ValueError('Witness weights must be positive')
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ValueError('Witness weights must sum to 1')
        for j, y in enumerate(self.vectors, start=1):
            norm = math.fsum(abs(c) ** self.p for c in y.entries.values()) ** (1.0 / self.p)
            if norm > 1.0 + 1e-12:
                raise ValueError(f'Witness vector y_{j} has quasi-norm {norm} > 1')
        modulus = float(self.q) ** (1.0 / self.p - 1.0)
        if self.combination_norm < modulus / 2.0:
            raise ValueError(f'Combination norm {self.combination_norm} is below C_q/2 = {modulus / 2.0}')
        return self
