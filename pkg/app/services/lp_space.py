# app/services/lp_space.py
import math
from typing import Iterable, Tuple

from app.core.config import settings
from app.exceptions.lp_space import InvalidExponentError
from app.schemas.lp_space import SparseVector


class LpSpaceService:
    """Quasi-norm arithmetic in l_p, 0 < p <= 1.

    The quasi-norm (sum |v_i|^p)^(1/p) is p-subadditive:
    ||v + w||^p <= ||v||^p + ||w||^p.
    """

    def __init__(self, p: float):
        if not 0.0 < p <= 1.0:
            raise InvalidExponentError(p)
        self.p = p

    def p_power(self, v: SparseVector) -> float:
        """sum_i |v_i|^p, the p-th power of the quasi-norm."""
        return math.fsum(abs(c) ** self.p for c in v.entries.values())

    def quasi_norm(self, v: SparseVector) -> float:
        total = self.p_power(v)
        if total == 0.0:
            return 0.0
        if self.p == 1.0:
            return total
        return total ** (1.0 / self.p)

    def distance(self, v: SparseVector, w: SparseVector) -> float:
        return self.quasi_norm(self.linear_combine([(1.0, v), (-1.0, w)]))

    @staticmethod
    def linear_combine(terms: Iterable[Tuple[float, SparseVector]]) -> SparseVector:
        return SparseVector.combine(terms, zero_tol=settings.ZERO_TOL)
