"""Sample-size planning and reliability demonstration for attribute inspection.

Implements the zero-failure success-run sizing rule

    n = ceil( ln(1 - confidence) / ln(reliability) )

together with its c-failure generalization: the smallest n for which a
binomial inspection with per-trial miss probability (1 - reliability)
observes at most `allowed_failures` misses with probability no greater
than (1 - confidence). The inverse problem (what reliability does a
finished run demonstrate?) is solved in closed form for zero failures
and by bisection otherwise.

All binomial tail mass is evaluated by logarithmic summation with
log-gamma binomial coefficients, so plans remain exact-in-spirit (no
normal approximation) and stable for n in the hundreds of thousands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, PlanInfeasibleError

DEFAULT_MAX_N = 10_000_000

# Reasons emitted by evaluate_run, stable for scripted consumers.
REASON_EXCESS_FAILURES = "failures exceed allowed"
REASON_INSUFFICIENT_SAMPLES = "insufficient samples"


def _require_probability(name: str, value: float) -> None:
    if not (0.0 < value < 1.0):
        raise DomainError(f"{name} must lie strictly inside (0, 1), got {value!r}")


def _log_binom_cdf(n: int, k: int, log_q: float, log_p: float) -> float:
    """log P(X <= k) for X ~ Binomial(n, q), with q given as (log_q, log_p=log(1-q))."""
    if k >= n:
        return 0.0
    terms = []
    for i in range(k + 1):
        log_coeff = (
            math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1)
        )
        terms.append(log_coeff + i * log_q + (n - i) * log_p)
    top = max(terms)
    return top + math.log(sum(math.exp(t - top) for t in terms))


def _accepts(n: int, k: int, reliability: float, confidence: float) -> bool:
    """True iff a plan of size n tolerates k failures at the stated levels."""
    log_q = math.log1p(-reliability)   # log of per-trial failure probability
    log_p = math.log(reliability)
    log_alpha = math.log1p(-confidence)
    return _log_binom_cdf(n, k, log_q, log_p) <= log_alpha


def success_run_size(confidence: float, reliability: float) -> int:
    """Zero-failure sample size demonstrating `reliability` at `confidence`.

    Returns ceil(ln(1-confidence)/ln(reliability)); an exactly integral
    ratio is returned unchanged. Minimum 1.
    """
    _require_probability("confidence", confidence)
    _require_probability("reliability", reliability)
    ratio = math.log1p(-confidence) / math.log(reliability)
    return max(1, math.ceil(ratio))


def plan_size(
    confidence: float,
    reliability: float,
    allowed_failures: int = 0,
    max_n: int = DEFAULT_MAX_N,
) -> int:
    """Smallest n accepting <= `allowed_failures` misses at the stated levels.

    For allowed_failures = 0 this reduces to `success_run_size`. The
    search starts at the zero-failure closed form (a lower bound, since
    tolerating failures never shrinks the plan), brackets by doubling,
    then bisects to the minimal n.

    Raises PlanInfeasibleError if the minimal n would exceed `max_n`.
    """
    _require_probability("confidence", confidence)
    _require_probability("reliability", reliability)
    if allowed_failures < 0:
        raise DomainError(
            f"allowed_failures must be >= 0, got {allowed_failures!r}"
        )

    base = success_run_size(confidence, reliability)
    if base > max_n:
        raise PlanInfeasibleError(
            f"plan infeasible: required n exceeds cap {max_n}"
        )
    if allowed_failures == 0:
        return base

    lo = max(base, 1)
    if _accepts(lo, allowed_failures, reliability, confidence):
        return lo
    hi = lo
    while not _accepts(hi, allowed_failures, reliability, confidence):
        if hi >= max_n:
            raise PlanInfeasibleError(
                f"plan infeasible: required n exceeds cap {max_n}"
            )
        hi = min(hi * 2, max_n)
    # invariant: lo rejects, hi accepts; minimal n is in (lo, hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _accepts(mid, allowed_failures, reliability, confidence):
            hi = mid
        else:
            lo = mid
    return hi


def demonstrated_reliability(
    tested_n: int, failures: int, confidence: float
) -> float:
    """Largest reliability a finished run demonstrates at `confidence`.

    Closed form (1-confidence)^(1/tested_n) for a clean run; otherwise
    bisection on the binomial acceptance condition to absolute tolerance
    1e-9. A run whose every sample failed demonstrates nothing and
    returns 0.0.
    """
    if tested_n < 1:
        raise DomainError(f"tested_n must be >= 1, got {tested_n!r}")
    if failures < 0 or failures > tested_n:
        raise DomainError(
            f"failures must lie in [0, tested_n], got {failures!r} of {tested_n!r}"
        )
    _require_probability("confidence", confidence)

    if failures == 0:
        return math.exp(math.log1p(-confidence) / tested_n)
    if failures == tested_n:
        return 0.0

    log_alpha = math.log1p(-confidence)

    def holds(r: float) -> bool:
        return (
            _log_binom_cdf(tested_n, failures, math.log1p(-r), math.log(r))
            <= log_alpha
        )

    # Acceptance holds for small r and breaks as r -> 1; bisect the boundary.
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-9:
        mid = (lo + hi) / 2.0
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class SamplingPlan:
    """An attribute-inspection demonstration plan.

    `required_n` is derived from the other three fields; the constructor
    enforces consistency so a plan loaded from file cannot silently
    disagree with its own parameters.
    """

    confidence: float
    reliability: float
    allowed_failures: int
    required_n: int

    def __post_init__(self):
        _require_probability("confidence", self.confidence)
        _require_probability("reliability", self.reliability)
        if self.allowed_failures < 0:
            raise DomainError("allowed_failures must be >= 0")
        expected = plan_size(self.confidence, self.reliability, self.allowed_failures)
        if self.required_n != expected:
            raise DomainError(
                f"required_n {self.required_n} does not match plan parameters "
                f"(expected {expected})"
            )

    def to_json_dict(self) -> dict:
        return {
            "confidence": self.confidence,
            "reliability": self.reliability,
            "allowed_failures": self.allowed_failures,
            "required_n": self.required_n,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SamplingPlan":
        return cls(
            confidence=doc["confidence"],
            reliability=doc["reliability"],
            allowed_failures=doc["allowed_failures"],
            required_n=doc["required_n"],
        )


def make_plan(
    confidence: float, reliability: float, allowed_failures: int = 0
) -> SamplingPlan:
    """Build a SamplingPlan, deriving required_n."""
    return SamplingPlan(
        confidence=confidence,
        reliability=reliability,
        allowed_failures=allowed_failures,
        required_n=plan_size(confidence, reliability, allowed_failures),
    )


@dataclass(frozen=True)
class RunOutcome:
    """Observed result of a demonstration run: units tested, misses seen."""

    tested_n: int
    failures: int

    def __post_init__(self):
        if self.tested_n < 0 or self.failures < 0:
            raise DomainError("counts must be non-negative")
        if self.failures > self.tested_n:
            raise DomainError(
                f"failures ({self.failures}) cannot exceed tested_n ({self.tested_n})"
            )


@dataclass(frozen=True)
class RunVerdict:
    passed: bool
    reasons: list = field(default_factory=list)


def evaluate_run(outcome: RunOutcome, plan: SamplingPlan) -> RunVerdict:
    """Judge a finished run against its plan.

    Passes iff failures stayed within the allowance and at least the
    required number of units was tested; each violated condition is
    reported as its own reason. Extra samples never hurt.
    """
    reasons = []
    if outcome.failures > plan.allowed_failures:
        reasons.append(REASON_EXCESS_FAILURES)
    if outcome.tested_n < plan.required_n:
        reasons.append(REASON_INSUFFICIENT_SAMPLES)
    return RunVerdict(passed=not reasons, reasons=reasons)
