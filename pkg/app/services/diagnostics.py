# app/services/diagnostics.py
import logging
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from app.core.config import settings
from app.exceptions.construction import CapExceededError, OutOfDomainError
from app.exceptions.moduli import SearchBudgetExceededError
from app.schemas.diagnostics import (
    BoundednessReport, DiagnosticsReport, DiagnosticsRow, InequalityCheck,
    JointContinuityReport, ProofInequalityReport, SeparateContinuityReport,
    TaxonomyLabel, Verdict,
)
from app.services.block_index import block_bounds, block_of
from app.services.construction import ConstructionService

logger = logging.getLogger(__name__)

Span = Tuple[int, int]


class DiagnosticsService:
    """Boundedness and continuity criteria for the averages of a construction."""

    def __init__(self, construction: ConstructionService):
        self.construction = construction
        self.lp = construction.lp
        self.tol = construction.spec.tol

    def _check_cap(self, Q: int, what: str) -> None:
        if not 1 <= Q <= self.construction.spec.q_cap:
            raise CapExceededError(Q, self.construction.spec.q_cap, what)

    def span_norm(self, m: int, n: int) -> float:
        return self.lp.quasi_norm(self.construction.partial_sum(m, n))

    def span_ratio(self, m: int, n: int) -> float:
        """||sum_{m..n} lambda_k x_k|| / sum_{m..n} lambda_k."""
        return self.span_norm(m, n) / self.construction.lambda_sum(m, n)

    # ------------------------------------------------------------------
    # boundedness

    @staticmethod
    def candidate_spans(Q: int) -> Iterable[Span]:
        """Spans that can realise the sup of span_ratio over 1 <= m <= n <= Q(Q+1).

        Same-block ratios peak on the two half blocks. A cross-block span
        only keeps the uncancelled tail of block q0 and head of block q1,
        and the ratio is quasi-convex in their lengths, so the extreme
        lengths (1 or q) suffice.
        """
        for q in range(1, Q + 1):
            yield q * q + 1, q * (q + 1)
            yield q * (q - 1) + 1, q * q
        for q0 in range(1, Q + 1):
            for q1 in range(q0 + 1, Q + 1):
                for m in (q0 * q0 + 1, q0 * (q0 + 1)):
                    for n in (q1 * q1, q1 * (q1 - 1) + 1):
                        yield m, n

    def _best(self, spans: Iterable[Span]) -> Tuple[float, Span]:
        best, best_span = -1.0, (1, 1)
        for m, n in spans:
            ratio = self.span_ratio(m, n)
            if ratio > best:
                best, best_span = ratio, (m, n)
        return best, best_span

    def exhaustive_sup_ratio(self, Q: int) -> Tuple[float, Span]:
        if Q > settings.EXHAUSTIVE_MAX_Q:
            raise SearchBudgetExceededError("exhaustive span search Q", Q, settings.EXHAUSTIVE_MAX_Q)
        self._check_cap(Q, "exhaustive span search")
        last = Q * (Q + 1)
        return self._best((m, n) for m in range(1, last + 1) for n in range(m, last + 1))

    def boundedness_report(self, Q: int) -> BoundednessReport:
        self._check_cap(Q, "boundedness report")
        c = self.construction
        sup_ratio, span = self._best(self.candidate_spans(Q))
        amplitudes = [c.amplitude(q) for q in range(1, Q + 1)]
        same_block = max(self.span_ratio(q * q + 1, q * (q + 1)) for q in range(1, Q + 1))
        verdict = c.bounded_verdict()
        logger.info("boundedness Q=%d: sup ratio %.12g over %s, same block %.12g, %s",
                    Q, sup_ratio, span, same_block, verdict.value)
        return BoundednessReport(
            Q=Q,
            sup_ratio=sup_ratio,
            sup_span=list(span),
            same_block_sup=same_block,
            verdict=verdict,
            amplitudes=amplitudes,
        )

    # ------------------------------------------------------------------
    # continuity

    def separate_continuity_report(self, Q: int) -> SeparateContinuityReport:
        """Closed-form ratios A_q C_q beta_q / tail_q next to measured tail ratios.

        The measured value at n = q^2 + 1 lies in [ratio_q / 2, ratio_q].
        """
        self._check_cap(Q, "separate continuity report")
        c = self.construction
        ratios = [c.amplitude(q) * c.beta_ratio(q) for q in range(1, Q + 1)]
        numeric = [c.tail_ratio(q * q + 1) for q in range(1, Q + 1)]
        consistent = all(
            r / 2.0 * (1.0 - self.tol) <= x <= r * (1.0 + self.tol) for r, x in zip(ratios, numeric)
        )
        if not consistent:
            logger.warning("separate continuity: measured tail ratios disagree with the closed form")
        return SeparateContinuityReport(
            Q=Q, ratios=ratios, numeric_ratios=numeric, consistent=consistent, verdict=c.separate_verdict()
        )

    def joint_continuity_report(self, Q: int) -> JointContinuityReport:
        self._check_cap(Q, "joint continuity report")
        c = self.construction
        return JointContinuityReport(
            Q=Q, amplitudes=[c.amplitude(q) for q in range(1, Q + 1)], verdict=c.joint_verdict()
        )

    # ------------------------------------------------------------------
    # inequality suite

    def verify_proof_inequalities(self, trials: int, seed: int, max_q: Optional[int] = None) -> ProofInequalityReport:
        """Checks the span estimates on seeded random spans plus every full and half block."""
        c = self.construction
        max_q = min(max_q or settings.VERIFY_MAX_Q, settings.VERIFY_MAX_Q, c.spec.q_cap)
        if trials < 1:
            raise OutOfDomainError("trials", trials, "the positive integers")
        rng = np.random.default_rng(seed)
        last = max_q * (max_q + 1)
        draws = np.sort(rng.integers(1, last + 1, size=(trials, 2)), axis=1)
        random_spans = [(int(m), int(n)) for m, n in draws]

        checks: Dict[str, InequalityCheck] = {
            name: InequalityCheck(name=name)
            for name in ("block_vanishing", "half_block_witness", "same_block_bound",
                         "half_block_bound", "cross_block_bound", "cross_block_beta_bound")
        }
        factor = 2.0 ** (1.0 / c.p - 1.0)

        def record(name: str, span: Span, lhs: float, rhs: float, relative: bool = True,
                   equality: bool = False) -> None:
            check = checks[name]
            check.checked += 1
            allowance = rhs * self.tol if relative else settings.VANISHING_TOL
            gap = abs(rhs - lhs) if equality else rhs - lhs
            ok = gap <= allowance if equality else gap >= -allowance
            slack = (rhs - lhs) / rhs if rhs > 0.0 else -lhs
            if check.tightest_slack is None or abs(slack) < abs(check.tightest_slack):
                check.tightest_slack = slack
                check.tightest_span = list(span)
            if not ok:
                check.violations.append({"m": span[0], "n": span[1], "lhs": lhs, "rhs": rhs})

        for q in range(1, max_q + 1):
            first, end = block_bounds(q)
            record("block_vanishing", (first, end), self.span_norm(first, end), 0.0, relative=False)
            witness = c.amplitude(q) * c.coefficient_beta(q)
            record("half_block_witness", (q * q + 1, end), self.span_norm(q * q + 1, end), witness, equality=True)

        for m, n in random_spans + [(q * q + 1, q * (q + 1)) for q in range(1, max_q + 1)]:
            lhs = self.span_norm(m, n)
            total = c.lambda_sum(m, n)
            q0, q1 = block_of(m), block_of(n)
            a0, a1 = c.amplitude(q0), c.amplitude(q1)
            if q0 == q1:
                record("same_block_bound", (m, n), lhs, a0 * total)
                record("half_block_bound", (m, n), lhs, a0 * c.coefficient_beta(q0))
            record("cross_block_bound", (m, n), lhs, factor * max(a0, a1) * total)
            record("cross_block_beta_bound", (m, n), lhs,
                   2.0 ** (1.0 / c.p) * (a0 * c.coefficient_beta(q0) + a1 * c.coefficient_beta(q1)))

        report = ProofInequalityReport(trials=trials, seed=seed, max_q=max_q, checks=list(checks.values()))
        for check in report.checks:
            logger.info("%s: %d checked, %d violations, tightest slack %s",
                        check.name, check.checked, len(check.violations), check.tightest_slack)
        return report

    # ------------------------------------------------------------------
    # classification

    def rows(self, Q: int) -> List[DiagnosticsRow]:
        c = self.construction
        rows = []
        for q in range(1, Q + 1):
            amplitude = c.amplitude(q)
            rows.append(DiagnosticsRow(
                q=q,
                A=c.coefficient_A(q),
                C=c.modulus(q),
                beta=c.coefficient_beta(q),
                amplitude=amplitude,
                separate_ratio=amplitude * c.beta_ratio(q),
            ))
            logger.debug("row q=%d: A_q C_q=%.17g", q, amplitude)
        return rows

    @staticmethod
    def label_for(bounded: Verdict, separate: Verdict, joint: Verdict,
                  continuity: Verdict, integrability: Verdict) -> TaxonomyLabel:
        verdicts = (bounded, separate, joint, continuity, integrability)
        if Verdict.FAILS in (continuity, integrability):
            return TaxonomyLabel.OUTSIDE_CONTINUOUS_INTEGRABLE
        if Verdict.UNDETERMINED in verdicts:
            return TaxonomyLabel.UNDETERMINED
        if joint == Verdict.HOLDS:
            return TaxonomyLabel.JOINTLY_CONTINUOUS
        table: Dict[Tuple[bool, bool], TaxonomyLabel] = {
            (True, True): TaxonomyLabel.BOUNDED_AND_SEPARATELY_NOT_JOINTLY,
            (True, False): TaxonomyLabel.BOUNDED_NOT_SEPARATELY,
            (False, True): TaxonomyLabel.SEPARATELY_NOT_BOUNDED,
            (False, False): TaxonomyLabel.NEITHER,
        }
        return table[(bounded == Verdict.HOLDS, separate == Verdict.HOLDS)]

    def classify(self, Q: int) -> TaxonomyLabel:
        self._check_cap(Q, "classification")
        c = self.construction
        return self.label_for(
            c.bounded_verdict(), c.separate_verdict(), c.joint_verdict(),
            c.continuity_verdict(), c.integrability_verdict(),
        )

    def build_report(self, Q: int, trials: Optional[int] = None, seed: int = 0) -> DiagnosticsReport:
        c = self.construction
        bounded = self.boundedness_report(Q)
        separate = self.separate_continuity_report(Q)
        joint = self.joint_continuity_report(Q)
        proof = self.verify_proof_inequalities(trials, seed) if trials else None
        report = DiagnosticsReport(
            config=c.spec.to_config(),
            rows=self.rows(Q),
            sup_ratio=bounded.sup_ratio,
            same_block_sup=bounded.same_block_sup,
            continuity=c.continuity_verdict(),
            integrability=c.integrability_verdict(),
            bounded=bounded.verdict,
            separately_continuous=separate.verdict,
            jointly_continuous=joint.verdict,
            label=self.classify(Q),
            proof_inequalities=proof,
        )
        logger.info("classification %s: %s", c.spec.variant.value, report.label.value)
        return report

    @staticmethod
    def failures(report: DiagnosticsReport) -> List[str]:
        """Human-readable list of violated checks."""
        if report.proof_inequalities is None:
            return []
        failed: List[str] = []
        for check in report.proof_inequalities.checks:
            for v in check.violations:
                failed.append(f"{check.name} at (m={v['m']}, n={v['n']}): lhs {v['lhs']:.17g} vs bound {v['rhs']:.17g}")
        return failed
