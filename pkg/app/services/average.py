# app/services/average.py
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.exceptions.average import InvalidPartitionError, UndefinedExtensionError
from app.exceptions.construction import CapExceededError, OutOfDomainError
from app.schemas.average import (
    AverageSample, BlowupRow, LipschitzEstimate, RiemannRow, TaggedPartition, TagRule,
)
from app.schemas.diagnostics import Verdict
from app.schemas.lp_space import SparseVector
from app.services.block_index import block_of, coordinate
from app.services.construction import ConstructionService

logger = logging.getLogger(__name__)


def tent_primitive(x: float) -> float:
    """Integral over [0, x] of the unit tent 4x / 4(1-x), x in [0, 1]."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    if x < 0.5:
        return 2.0 * x * x
    return 1.0 - 2.0 * (1.0 - x) * (1.0 - x)


class AverageService:
    """Exact integrals and averages of the tent-sum function of a construction."""

    def __init__(self, construction: ConstructionService):
        self.construction = construction
        self.lp = construction.lp

    # ------------------------------------------------------------------
    # integrals

    def _tent_weight(self, q: int, i: int, s: float, t: float) -> float:
        c = self.construction
        left, right = c.offset_node(q, i), c.offset_node(q, i + 1)
        step = c.step(q)
        if s <= left and t >= right:
            return step
        if t <= left or s >= right:
            return 0.0
        a = (max(s, left) - left) / step
        b = (min(t, right) - left) / step
        return step * (tent_primitive(b) - tent_primitive(a))

    def block_weight(self, k: int, s: float, t: float) -> float:
        """Integral of the k-th tent over [s, t] intersected with I_k."""
        if s > t:
            raise OutOfDomainError("(s, t)", (s, t), "s <= t")
        q = block_of(k)
        return self._tent_weight(q, k - q * (q - 1) - 1, s, t)

    def _accumulate(self, q: int, first: int, last: int, s: float, t: float,
                    grouped: Dict[int, List[float]]) -> None:
        A = self.construction.coefficient_A(q)
        for i in range(first, last + 1):
            weight = self._tent_weight(q, i, s, t)
            if weight == 0.0:
                continue
            j, eps = self.construction.position(q, i)
            grouped.setdefault(coordinate(q, j), []).append(eps * A * weight)

    def integral(self, s: float, t: float) -> SparseVector:
        """Integral of f over [s, t]; full blocks strictly inside vanish and are skipped."""
        if not 0.0 <= s <= t <= 1.0:
            raise OutOfDomainError("(s, t)", (s, t), "0 <= s <= t <= 1")
        if s == t:
            return SparseVector.zero()
        c = self.construction
        qs, i_s = c.locate_index(s)
        grouped: Dict[int, List[float]] = {}
        if t == 1.0:
            self._accumulate(qs, i_s, 2 * qs - 1, s, t, grouped)
            return c.vector_from(grouped)
        qt, i_t = c.locate_index(t)
        if qs == qt:
            self._accumulate(qs, i_s, i_t, s, t, grouped)
        else:
            self._accumulate(qs, i_s, 2 * qs - 1, s, t, grouped)
            self._accumulate(qt, 0, i_t, s, t, grouped)
        return c.vector_from(grouped)

    def primitive(self, t: float) -> SparseVector:
        return self.integral(0.0, t)

    # ------------------------------------------------------------------
    # averages

    def corner_value(self) -> SparseVector:
        """Value of the extension at (1, 1): zero iff the averages are separately continuous there."""
        verdict = self.construction.separate_verdict()
        if verdict != Verdict.HOLDS:
            raise UndefinedExtensionError(self.construction.spec.variant.value, verdict.value)
        return SparseVector.zero()

    def ave(self, s: float, t: float) -> AverageSample:
        for name, value in (("s", s), ("t", t)):
            if not 0.0 <= value <= 1.0:
                raise OutOfDomainError(name, value, "[0, 1]")
        lo, hi = (s, t) if s <= t else (t, s)
        if lo == hi:
            value = self.corner_value() if lo == 1.0 else self.construction.f_eval(lo)
        else:
            width = hi - lo
            total = self.integral(lo, hi)
            value = SparseVector(entries={k: v / width for k, v in total.entries.items()})
        return AverageSample(s=s, t=t, value=value, norm=self.lp.quasi_norm(value))

    def half_block_pair(self, q: int) -> Tuple[float, float]:
        """(t_{q^2}, t_{q(q+1)}): the eps = +1 half of block q."""
        return self.construction.node(q * q), self.construction.node(q * (q + 1))

    def blowup_rows(self, Q: int) -> List[BlowupRow]:
        c = self.construction
        if Q > c.spec.q_cap:
            raise CapExceededError(Q, c.spec.q_cap, "blow-up table")
        rows = []
        for q in range(1, Q + 1):
            if not c.resolved(q):
                logger.warning("block %d is below double resolution; blow-up table stops at q=%d", q, q - 1)
                break
            s, t = self.half_block_pair(q)
            sample = self.ave(s, t)
            rows.append(BlowupRow(q=q, s=s, t=t, norm=sample.norm, predicted=c.amplitude(q)))
            logger.debug("blow-up q=%d norm=%.17g predicted=%.17g", q, sample.norm, rows[-1].predicted)
        return rows

    # ------------------------------------------------------------------
    # Riemann sums

    @staticmethod
    def uniform_partition(cells: int, tag: TagRule = "midpoint", seed: Optional[int] = None) -> TaggedPartition:
        try:
            return TaggedPartition.uniform(cells, tag=tag, seed=seed)
        except ValueError as e:
            raise InvalidPartitionError(str(e))

    def riemann_sum(self, partition: TaggedPartition) -> SparseVector:
        """sum_i (u_i - u_{i-1}) f(xi_i)."""
        grouped: Dict[int, List[float]] = {}
        nodes = partition.nodes
        for i, tag in enumerate(partition.tags):
            term = self.construction.tent_term(tag)
            if term is None:
                continue
            coord, coef = term
            grouped.setdefault(coord, []).append((nodes[i + 1] - nodes[i]) * coef)
        return self.construction.vector_from(grouped)

    def riemann_rows(self, mesh_exponents: Sequence[int], tag: TagRule = "midpoint",
                     seed: Optional[int] = None) -> List[RiemannRow]:
        rows = []
        for m in mesh_exponents:
            if m < 0:
                raise InvalidPartitionError(f"mesh exponent must be nonnegative, got {m}")
            partition = self.uniform_partition(2 ** m, tag=tag, seed=seed)
            norm = self.lp.quasi_norm(self.riemann_sum(partition))
            rows.append(RiemannRow(mesh_exponent=m, mesh=partition.mesh, cells=2 ** m, norm=norm))
            logger.info("Riemann sum mesh 2^-%d: norm %.6g", m, norm)
        return rows

    # ------------------------------------------------------------------
    # scans

    def aligned_points(self, q_to: int, lo: float = 0.0) -> List[float]:
        """Block starts t_{q(q-1)} and half-block nodes t_{q^2} for q <= q_to, plus t_{q_to(q_to+1)}."""
        c = self.construction
        # t_{q_to(q_to+1)} opens block q_to + 1
        if q_to + 1 > c.spec.q_cap:
            raise CapExceededError(q_to + 1, c.spec.q_cap, "block-aligned points")
        points = []
        for q in range(1, q_to + 1):
            points.extend([c.node(q * (q - 1)), c.node(q * q)])
        points.append(c.node(q_to * (q_to + 1)))
        return sorted({u for u in points if u >= lo})

    def _same_block(self, s: float, t: float) -> bool:
        if s >= 1.0:
            return False
        q, _ = self.construction.locate_index(s)
        return t <= self.construction.block_start(q + 1)

    def lipschitz_quotient(self, grid_size: int, aligned_q: Optional[int] = None) -> LipschitzEstimate:
        """max ||Ave[f](s, t)|| over grid pairs s < t, a lower bound for ||primitive||_Lip."""
        if grid_size < 2:
            raise OutOfDomainError("grid_size", grid_size, "integers >= 2")
        points = set(np.linspace(0.0, 1.0, grid_size).tolist())
        if aligned_q is not None:
            points.update(self.aligned_points(aligned_q))
        grid = sorted(points)
        best, best_span, same_block = 0.0, [0.0, 1.0], 0.0
        for a, s in enumerate(grid):
            for t in grid[a + 1:]:
                norm = self.ave(s, t).norm
                if norm > best:
                    best, best_span = norm, [s, t]
                if norm > same_block and self._same_block(s, t):
                    same_block = norm
        logger.info("Lipschitz quotient over %d points: %.12g (same block %.12g)", len(grid), best, same_block)
        return LipschitzEstimate(grid_points=len(grid), quotient=best, span=best_span, same_block_quotient=same_block)

    def window_sup(self, lo: float, q_to: int) -> float:
        """max ||Ave[f](s, t)|| over block-aligned pairs s < t inside [lo, 1)."""
        points = self.aligned_points(q_to, lo=lo)
        best = 0.0
        for a, s in enumerate(points):
            for t in points[a + 1:]:
                best = max(best, self.ave(s, t).norm)
        return best

    def snap_points(self, lo: float, hi: float) -> List[float]:
        """Resolved nodes t_{q^2} and t_{q(q+1)} in [lo, hi] that stay inside q_cap."""
        c = self.construction
        points = []
        for q in range(1, c.spec.q_cap + 1):
            if not c.resolved(q):
                break
            for k in (q * q, q * (q + 1)):
                if k > q * q and q + 1 > c.spec.q_cap:
                    continue
                u = c.node(k)
                if lo <= u <= hi:
                    points.append(u)
        return points

    def grid_scan(self, s_range: Tuple[float, float], t_range: Tuple[float, float], n: int,
                  snap: bool = False) -> List[AverageSample]:
        """Row-major table of averages; an undefined (1, 1) cell is skipped."""
        if n < 1:
            raise OutOfDomainError("n", n, "the positive integers")
        axes = []
        for name, (lo, hi) in (("s_range", s_range), ("t_range", t_range)):
            if not 0.0 <= lo <= hi <= 1.0:
                raise OutOfDomainError(name, (lo, hi), "0 <= lo <= hi <= 1")
            values = [lo] if n == 1 else np.linspace(lo, hi, n).tolist()
            if snap:
                values.extend(self.snap_points(lo, hi))
            axes.append(sorted(set(values)))
        samples = []
        for s in axes[0]:
            for t in axes[1]:
                try:
                    samples.append(self.ave(s, t))
                except UndefinedExtensionError as e:
                    logger.warning("skipping cell (1, 1): %s", e.message)
                except CapExceededError as e:
                    logger.warning("skipping cell (%r, %r): %s", s, t, e.message)
        logger.info("grid scan: %d x %d cells", len(axes[0]), len(axes[1]))
        return samples
