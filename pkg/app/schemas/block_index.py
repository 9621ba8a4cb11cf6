from typing import Literal

from pydantic import BaseModel, ConfigDict, PositiveInt, model_validator


class BlockCoordinates(BaseModel):
    """(q, j, eps) with k = (2q^2 + 1)/2 + eps(2j - 1)/2."""
    model_config = ConfigDict(frozen=True)

    q: PositiveInt
    j: PositiveInt
    eps: Literal[-1, 1]

    @model_validator(mode='after')
    def validate_position(self) -> "BlockCoordinates":
        if self.j > self.q:
            raise ValueError(f'Position j={self.j} must lie in [1, q={self.q}]')
        return self
