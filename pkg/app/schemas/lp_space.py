import math
from typing import Dict, Iterable, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator
from typing_extensions import Annotated

# 0 < p <= 1; p = 1 is the Banach control case
PExponent = Annotated[float, Field(gt=0.0, le=1.0)]


class SparseVector(BaseModel):
    """Finitely supported real sequence: coordinate -> nonzero coefficient."""
    model_config = ConfigDict(frozen=True)

    entries: Dict[int, float] = Field(default_factory=dict)

    @field_validator('entries')
    @classmethod
    def validate_entries(cls, v: Dict[int, float]) -> Dict[int, float]:
        cleaned: Dict[int, float] = {}
        for coord, coef in v.items():
            if coord < 1:
                raise ValueError(f'Coordinates must be positive integers, got {coord}')
            if not math.isfinite(coef):
                raise ValueError(f'Coefficient at coordinate {coord} is not finite')
            if coef != 0.0:
                cleaned[coord] = float(coef)
        return dict(sorted(cleaned.items()))

    @classmethod
    def zero(cls) -> "SparseVector":
        return cls()

    @classmethod
    def unit(cls, coordinate: int, coefficient: float = 1.0) -> "SparseVector":
        return cls(entries={coordinate: coefficient})

    @classmethod
    def combine(cls, terms: Iterable[Tuple[float, "SparseVector"]], zero_tol: float = 0.0) -> "SparseVector":
        """Coordinate-wise compensated sum of scaled vectors; |sum| <= zero_tol is dropped."""
        grouped: Dict[int, List[float]] = {}
        for scalar, vector in terms:
            if scalar == 0.0:
                continue
            for coord, coef in vector.entries.items():
                grouped.setdefault(coord, []).append(scalar * coef)
        entries = {}
        for coord, parts in grouped.items():
            total = math.fsum(parts)
            if abs(total) > zero_tol:
                entries[coord] = total
        return cls(entries=entries)

    def coefficient(self, coordinate: int) -> float:
        return self.entries.get(coordinate, 0.0)

    def support(self) -> List[int]:
        return list(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def scale(self, alpha: float) -> "SparseVector":
        if alpha == 0.0:
            return SparseVector()
        return SparseVector(entries={c: alpha * v for c, v in self.entries.items()})

    def __add__(self, other: "SparseVector") -> "SparseVector":
        return SparseVector.combine([(1.0, self), (1.0, other)])

    def __sub__(self, other: "SparseVector") -> "SparseVector":
        return SparseVector.combine([(1.0, self), (-1.0, other)])

    def __neg__(self) -> "SparseVector":
        return self.scale(-1.0)

    def __len__(self) -> int:
        return len(self.entries)
