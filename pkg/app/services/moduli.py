# app/services/moduli.py
import itertools
import logging
import math
from typing import List

import numpy as np
from sympy.utilities.iterables import multiset_partitions

from app.core.config import settings
from app.exceptions.construction import OutOfDomainError
from app.exceptions.moduli import SearchBudgetExceededError
from app.schemas.lp_space import SparseVector
from app.schemas.moduli import WitnessFamily
from app.services.block_index import coordinate
from app.services.lp_space import LpSpaceService

logger = logging.getLogger(__name__)


class ModuliService:
    """Lack-of-convexity modulus C_q of l_p and its extremal witnesses."""

    def __init__(self, p: float):
        self.lp = LpSpaceService(p)
        self.p = p

    def concavity_modulus(self, q: int) -> float:
        """C_q = q^(1/p - 1): uniform weights on disjoint unit vectors attain the bound."""
        if q < 1:
            raise OutOfDomainError("q", q, "the positive integers")
        return float(q) ** (1.0 / self.p - 1.0)

    def extremal_witness(self, q: int) -> WitnessFamily:
        if q < 1:
            raise OutOfDomainError("q", q, "the positive integers")
        weights = [1.0 / q] * q
        vectors = [SparseVector.unit(coordinate(q, j)) for j in range(1, q + 1)]
        combination = self.lp.linear_combine(zip(weights, vectors))
        return WitnessFamily(
            q=q,
            p=self.p,
            weights=weights,
            vectors=vectors,
            combination_norm=self.lp.quasi_norm(combination),
        )

    def modulus_sup_oracle(self, q: int, resolution: float) -> float:
        """Brute-force max of ||sum mu_j y_j|| over a simplex grid and unit-vector patterns.

        Candidate y_j are signed unit vectors; vectors in the same group of a set
        partition share a coordinate, distinct groups are disjoint. The grid has
        step `resolution` and strictly positive weights.
        """
        if q > settings.ORACLE_MAX_Q:
            raise SearchBudgetExceededError("modulus oracle block size q", q, settings.ORACLE_MAX_Q)
        if q < 1:
            raise OutOfDomainError("q", q, "the positive integers")
        if not 0.0 < resolution <= 1.0:
            raise OutOfDomainError("resolution", resolution, "(0, 1]")

        steps = max(q, int(round(1.0 / resolution)))
        n_points = math.comb(steps - 1, q - 1)
        if n_points > settings.ORACLE_MAX_POINTS:
            raise SearchBudgetExceededError("simplex grid points", n_points, settings.ORACLE_MAX_POINTS)
        weights = self._simplex_grid(q, steps)

        best = 0.0
        for groups in multiset_partitions(list(range(q))):
            for signs in itertools.product((1.0, -1.0), repeat=q):
                # a global sign flip of a group leaves the norm unchanged
                if any(signs[group[0]] < 0 for group in groups):
                    continue
                pattern = np.zeros((q, len(groups)))
                for g, group in enumerate(groups):
                    for j in group:
                        pattern[j, g] = signs[j]
                sums = np.abs(weights @ pattern)
                values = np.sum(sums ** self.p, axis=1) ** (1.0 / self.p)
                best = max(best, float(values.max()))
        logger.debug("modulus oracle q=%d p=%s steps=%d points=%d -> %.12g", q, self.p, steps, n_points, best)
        return best

    @staticmethod
    def _simplex_grid(q: int, steps: int) -> np.ndarray:
        """All weight vectors with entries in {1/steps, 2/steps, ...} summing to 1."""
        bars: List[tuple] = list(itertools.combinations(range(1, steps), q - 1))
        cuts = np.array(bars, dtype=float).reshape(len(bars), q - 1)
        edges = np.hstack([
            np.zeros((len(bars), 1)),
            cuts,
            np.full((len(bars), 1), float(steps)),
        ])
        return np.diff(edges, axis=1) / steps
