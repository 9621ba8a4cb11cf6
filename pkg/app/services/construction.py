# app/services/construction.py
import logging
import math
from typing import Dict, List, Optional, Tuple

from app.core.config import settings
from app.exceptions.construction import CapExceededError, OutOfDomainError
from app.schemas.construction import (
    ConstructionSpec, ConstructionSummary, GeometricWeights,
    TableAmplitude, TentInterval, Variant, admissibility_bound,
)
from app.schemas.diagnostics import Verdict
from app.schemas.lp_space import SparseVector
from app.services.block_index import block_bounds, block_of, coordinate, decode
from app.services.lp_space import LpSpaceService
from app.services.moduli import ModuliService

logger = logging.getLogger(__name__)


class ConstructionService:
    """Coefficients, partition and tent-sum function f of one construction.

    Block q holds the 2q indices q(q-1)+1 .. q(q+1); every tent in it has
    length lambda = beta_q / q, and the block occupies
    [1 - 2 sum_{r>=q} beta_r, 1 - 2 sum_{r>q} beta_r).
    """

    def __init__(self, spec: ConstructionSpec):
        self.spec = spec
        self.p = spec.p
        self.lp = LpSpaceService(spec.p)
        self.moduli = ModuliService(spec.p)
        self._A: Dict[int, float] = {}
        self._beta: Dict[int, float] = {}
        self._start: Dict[int, float] = {}

    # ------------------------------------------------------------------
    # coefficient sequences

    def modulus(self, q: int) -> float:
        return self.moduli.concavity_modulus(q)

    def coefficient_A(self, q: int) -> float:
        cached = self._A.get(q)
        if cached is not None:
            return cached
        rule = self.spec.amplitude
        if isinstance(rule, TableAmplitude):
            if q > len(rule.values):
                raise CapExceededError(q, len(rule.values), "amplitude table lookup")
            value = rule.values[q - 1]
        else:
            value = rule.coefficient * float(q) ** (-rule.q_exponent) * self.modulus(q) ** (-rule.modulus_exponent)
        self._A[q] = value
        return value

    def amplitude(self, q: int) -> float:
        """A_q C_q, evaluated in closed form so that exact rules give exact values."""
        rule = self.spec.amplitude
        if isinstance(rule, TableAmplitude):
            return self.coefficient_A(q) * self.modulus(q)
        return rule.coefficient * float(q) ** (-rule.q_exponent) * self.modulus(q) ** (1.0 - rule.modulus_exponent)

    def amplitude_exponent(self) -> Optional[float]:
        """e with A_q C_q = c q^e; None for tabulated amplitudes."""
        rule = self.spec.amplitude
        if isinstance(rule, TableAmplitude):
            return None
        return (1.0 / self.p - 1.0) * (1.0 - rule.modulus_exponent) - rule.q_exponent

    def decay_exponent(self) -> Optional[float]:
        """d with A_q = ||x_k|| ~ q^(-d); None for tabulated amplitudes."""
        rule = self.spec.amplitude
        if isinstance(rule, TableAmplitude):
            return None
        return rule.q_exponent + rule.modulus_exponent * (1.0 / self.p - 1.0)

    def coefficient_beta(self, q: int) -> float:
        cached = self._beta.get(q)
        if cached is not None:
            return cached
        if q < 1:
            raise OutOfDomainError("q", q, "the positive integers")
        rule = self.spec.weights
        if isinstance(rule, GeometricWeights):
            value = (1.0 - rule.ratio) * rule.ratio ** (q - 1) / 2.0
        else:
            value = (float(q) ** (-rule.b) - float(q + 1) ** (-rule.b)) / 2.0
        self._beta[q] = value
        return value

    def beta_tail(self, q: int) -> float:
        """sum_{r >= q} beta_r in closed form."""
        rule = self.spec.weights
        if isinstance(rule, GeometricWeights):
            return rule.ratio ** (q - 1) / 2.0
        return float(q) ** (-rule.b) / 2.0

    def beta_ratio(self, q: int) -> float:
        """beta_q / sum_{r >= q} beta_r in closed form."""
        rule = self.spec.weights
        if isinstance(rule, GeometricWeights):
            return 1.0 - rule.ratio
        return 1.0 - (q / (q + 1.0)) ** rule.b

    def beta_ratio_decay(self) -> float:
        """beta_q / tail_q ~ q^(-decay): constant for geometric, ~b/q for telescoping."""
        return 0.0 if isinstance(self.spec.weights, GeometricWeights) else 1.0

    def beta_total(self) -> float:
        """sum_q beta_q from the first q_cap terms plus the exact tail; equals 1/2."""
        q_cap = self.spec.q_cap
        head = [self.coefficient_beta(q) for q in range(1, q_cap + 1)]
        return math.fsum(head + [self.beta_tail(q_cap + 1)])

    def step(self, q: int) -> float:
        """Length beta_q / q shared by every tent of block q."""
        return self.coefficient_beta(q) / q

    def lambda_(self, k: int) -> float:
        return self.step(block_of(k))

    def x_vector(self, k: int) -> SparseVector:
        c = decode(k)
        return SparseVector.unit(coordinate(c.q, c.j), c.eps * self.coefficient_A(c.q))

    # ------------------------------------------------------------------
    # partition

    def block_start(self, q: int) -> float:
        cached = self._start.get(q)
        if cached is None:
            cached = 1.0 - 2.0 * self.beta_tail(q)
            self._start[q] = cached
        return cached

    def offset_node(self, q: int, i: int) -> float:
        """Node after the first i tents of block q (0 <= i <= 2q)."""
        if i == 0:
            return self.block_start(q)
        if i == 2 * q:
            return self.block_start(q + 1)
        return self.block_start(q) + (i * self.coefficient_beta(q)) / q

    def node(self, k: int) -> float:
        """t_k = lambda_1 + ... + lambda_k via closed-form block ends."""
        if k < 0:
            raise OutOfDomainError("k", k, "the nonnegative integers")
        if k == 0:
            return 0.0
        q = block_of(k)
        return self.offset_node(q, k - q * (q - 1))

    def _block_containing(self, u: float) -> int:
        """Block q with block_start(q) <= u < block_start(q + 1); q_cap does not apply to points."""
        rule = self.spec.weights
        if u == 0.0:
            guess = 1
        elif isinstance(rule, GeometricWeights):
            guess = 1 + int(math.floor(math.log1p(-u) / math.log(rule.ratio)))
        else:
            guess = int(math.floor((1.0 - u) ** (-1.0 / rule.b)))
        q = max(1, guess)
        while self.block_start(q + 1) <= u:
            q += 1
        while q > 1 and self.block_start(q) > u:
            q -= 1
        return q

    def locate_index(self, u: float) -> Tuple[int, int]:
        """(q, i) with offset_node(q, i) <= u < offset_node(q, i + 1)."""
        if not 0.0 <= u < 1.0:
            raise OutOfDomainError("u", u, "[0, 1)")
        q = self._block_containing(u)
        start, step = self.block_start(q), self.step(q)
        if step <= 0.0:
            raise OutOfDomainError("u", u, "the part of [0, 1) where block lengths are representable")
        i = min(max(int((u - start) / step), 0), 2 * q - 1)
        while i < 2 * q - 1 and self.offset_node(q, i + 1) <= u:
            i += 1
        while i > 0 and self.offset_node(q, i) > u:
            i -= 1
        return q, i

    def locate(self, u: float) -> TentInterval:
        q, i = self.locate_index(u)
        left, right = self.offset_node(q, i), self.offset_node(q, i + 1)
        return TentInterval(
            k=q * (q - 1) + 1 + i,
            left=left,
            right=right,
            midpoint=(left + right) / 2.0,
            length=self.step(q),
        )

    @staticmethod
    def position(q: int, i: int) -> Tuple[int, int]:
        """(j, eps) of the (i+1)-th tent of block q."""
        if i < q:
            return q - i, -1
        return i - q + 1, 1

    # ------------------------------------------------------------------
    # the function f

    def tent_term(self, u: float) -> Optional[Tuple[int, float]]:
        """(coordinate, coefficient) of f(u), or None where f(u) = 0."""
        if not 0.0 <= u <= 1.0:
            raise OutOfDomainError("u", u, "[0, 1]")
        if u == 1.0:
            return None
        q, i = self.locate_index(u)
        step = self.step(q)
        a = min(max((u - self.offset_node(q, i)) / step, 0.0), 1.0)
        height = 4.0 * a if a < 0.5 else 4.0 * (1.0 - a)
        if height == 0.0:
            return None
        j, eps = self.position(q, i)
        return coordinate(q, j), height * eps * self.coefficient_A(q)

    def f_eval(self, u: float) -> SparseVector:
        term = self.tent_term(u)
        if term is None:
            return SparseVector.zero()
        return SparseVector.unit(*term)

    # ------------------------------------------------------------------
    # partial sums of lambda_k x_k

    def _block_segment(self, q: int, m: int, n: int, grouped: Dict[int, List[float]]) -> None:
        A, step = self.coefficient_A(q), self.step(q)
        first = q * (q - 1) + 1
        for k in range(m, n + 1):
            j, eps = self.position(q, k - first)
            grouped.setdefault(coordinate(q, j), []).append(eps * A * step)

    def vector_from(self, grouped: Dict[int, List[float]]) -> SparseVector:
        entries = {}
        for coord, parts in grouped.items():
            total = math.fsum(parts)
            if abs(total) > settings.ZERO_TOL:
                entries[coord] = total
        return SparseVector(entries=entries)

    def partial_sum(self, m: int, n: int) -> SparseVector:
        """sum_{k=m}^{n} lambda_k x_k; full blocks in between vanish identically."""
        if not 1 <= m <= n:
            raise OutOfDomainError("(m, n)", (m, n), "1 <= m <= n")
        q0, q1 = block_of(m), block_of(n)
        grouped: Dict[int, List[float]] = {}
        if q0 == q1:
            self._block_segment(q0, m, n, grouped)
        else:
            self._block_segment(q0, m, block_bounds(q0)[1], grouped)
            self._block_segment(q1, block_bounds(q1)[0], n, grouped)
        return self.vector_from(grouped)

    def lambda_sum(self, m: int, n: int) -> float:
        if not 1 <= m <= n:
            raise OutOfDomainError("(m, n)", (m, n), "1 <= m <= n")
        q0, q1 = block_of(m), block_of(n)
        if q0 == q1:
            return (n - m + 1) * self.step(q0)
        head = (block_bounds(q0)[1] - m + 1) * self.step(q0)
        middle = 2.0 * (self.beta_tail(q0 + 1) - self.beta_tail(q1))
        tail = (n - block_bounds(q1)[0] + 1) * self.step(q1)
        return math.fsum([head, middle, tail])

    def lambda_tail(self, n: int) -> float:
        """sum_{k >= n} lambda_k."""
        q = block_of(n)
        return math.fsum([(block_bounds(q)[1] - n + 1) * self.step(q), 2.0 * self.beta_tail(q + 1)])

    def tail_ratio(self, n: int) -> float:
        """||sum_{k>=n} lambda_k x_k|| / sum_{k>=n} lambda_k; blocks after q(n) vanish."""
        if n < 1:
            raise OutOfDomainError("n", n, "the positive integers")
        q = block_of(n)
        numerator = self.lp.quasi_norm(self.partial_sum(n, block_bounds(q)[1]))
        return numerator / self.lambda_tail(n)

    # ------------------------------------------------------------------
    # criteria inputs

    def integrability_series(self, Q: int) -> Tuple[float, Optional[float]]:
        """Partial sum of sum_q q^(1-p) beta_q^p up to Q and a bound on the rest (None if divergent)."""
        p = self.p
        partial = math.fsum(float(q) ** (1.0 - p) * self.coefficient_beta(q) ** p for q in range(1, Q + 1))
        rule = self.spec.weights
        if isinstance(rule, GeometricWeights):
            rho = rule.ratio ** p
            scale = ((1.0 - rule.ratio) / 2.0) ** p
            bound = scale * rho ** Q * (Q + 1 - Q * rho) / (1.0 - rho) ** 2
            return partial, bound
        s = rule.b * p + 2.0 * p - 1.0
        if s <= 1.0:
            return partial, None
        return partial, (rule.b / 2.0) ** p * float(Q) ** (1.0 - s) / (s - 1.0)

    def continuity_verdict(self) -> Verdict:
        """f is continuous iff ||x_k|| = A_q -> 0."""
        d = self.decay_exponent()
        if d is None:
            return Verdict.UNDETERMINED
        return Verdict.HOLDS if d > 0.0 else Verdict.FAILS

    def integrability_verdict(self) -> Verdict:
        """Bounded x_k and sum_k lambda_k^p < oo give Riemann integrability."""
        d = self.decay_exponent()
        if d is None:
            return Verdict.UNDETERMINED
        if d < 0.0:
            return Verdict.FAILS
        _, tail_bound = self.integrability_series(self.spec.q_cap)
        return Verdict.HOLDS if tail_bound is not None else Verdict.FAILS

    def bounded_verdict(self) -> Verdict:
        e = self.amplitude_exponent()
        if e is None:
            return Verdict.UNDETERMINED
        return Verdict.HOLDS if e <= 0.0 else Verdict.FAILS

    def separate_verdict(self) -> Verdict:
        """A_q -> 0 and A_q C_q beta_q / tail_q ~ q^(e - decay) -> 0.

        Without A_q -> 0 the diagonal values f(c_k) = 2 x_k keep norm 2 A_q,
        so no extension at (1, 1) is continuous in either variable.
        """
        continuity = self.continuity_verdict()
        if continuity != Verdict.HOLDS:
            return continuity
        e = self.amplitude_exponent()
        return Verdict.HOLDS if e - self.beta_ratio_decay() < 0.0 else Verdict.FAILS

    def joint_verdict(self) -> Verdict:
        e = self.amplitude_exponent()
        if e is None:
            return Verdict.UNDETERMINED
        return Verdict.HOLDS if e < 0.0 else Verdict.FAILS

    def resolved(self, q: int) -> bool:
        """Whether the 2q + 1 nodes of block q are distinct doubles."""
        previous = self.offset_node(q, 0)
        for i in range(1, 2 * q + 1):
            current = self.offset_node(q, i)
            if not current > previous:
                return False
            previous = current
        return True

    def summary(self) -> ConstructionSummary:
        partial, tail_bound = self.integrability_series(self.spec.q_cap)
        beta_total = self.beta_total()
        summary = ConstructionSummary(
            config=self.spec.to_config(),
            admissibility_bound=admissibility_bound(self.p) if self.spec.variant == Variant.THM13 else None,
            beta_sum=beta_total,
            lambda_total=2.0 * beta_total,
            amplitude_exponent=self.amplitude_exponent(),
            integrability_partial_sum=partial,
            integrability_tail_bound=tail_bound,
        )
        logger.debug("construction %s: sum beta = %.17g", self.spec.variant.value, beta_total)
        return summary
