"""Delay-tolerant optimistic confidence bounds.

Three UCB-style index families share one surface: plain UCB1, UCB1 with a
known noise scale, and the empirical-Bernstein UCB-V.  Delay awareness is
entirely carried by the statistics fed in: the sample count ``s`` is the
number of feedbacks actually observed, not queries issued, so outstanding
feedback widens the bound on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .partition import NodeStats


class PolicyKind(str, Enum):
    UCB1 = "ucb1"
    UCB1_SIGMA = "ucb1-sigma"
    UCBV = "ucbv"


@dataclass(frozen=True)
class PolicyParams:
    """Selects and parameterizes the confidence-bound family.

    ``sigma`` is the known noise standard deviation (ucb1-sigma only),
    ``b`` a proxy upper bound on feedback magnitude (ucbv only; a loose
    value is fine), and ``c`` scales the ucbv range term (default 1).
    """

    kind: PolicyKind
    sigma: Optional[float] = None
    b: Optional[float] = None
    c: float = 1.0

    def validate(self) -> "PolicyParams":
        if self.kind == PolicyKind.UCB1_SIGMA:
            if self.sigma is None or not math.isfinite(self.sigma) or self.sigma < 0.0:
                raise ValueError("ucb1-sigma requires a finite sigma >= 0")
        if self.kind == PolicyKind.UCBV:
            if self.b is None or not math.isfinite(self.b) or self.b <= 0.0:
                raise ValueError("ucbv requires a finite range proxy b > 0")
            if not self.c > 0.0:
                raise ValueError("ucbv exploration scale c must be > 0")
        return self


def empirical_mean(stats: NodeStats) -> float:
    if stats.observed == 0:
        raise ValueError("no data: node has zero observed feedbacks")
    return stats.sum / stats.observed


def empirical_variance(stats: NodeStats) -> float:
    """Population variance of observed feedbacks, clamped at 0 against rounding."""
    if stats.observed == 0:
        raise ValueError("no data: node has zero observed feedbacks")
    mean = stats.sum / stats.observed
    return max(0.0, stats.sum_sq / stats.observed - mean * mean)


def confidence_bound(params: PolicyParams, stats: NodeStats, t: int) -> float:
    """Optimistic index for one node at round ``t``; +inf with no observations."""
    if t < 1:
        raise ValueError(f"round index must be >= 1, got {t}")
    s = stats.observed
    if s == 0:
        return math.inf
    mean = stats.sum / s
    log_t = math.log(t)
    if params.kind == PolicyKind.UCB1:
        return mean + math.sqrt(2.0 * log_t / s)
    if params.kind == PolicyKind.UCB1_SIGMA:
        return mean + math.sqrt(2.0 * params.sigma * params.sigma * log_t / s)
    variance = empirical_variance(stats)
    return mean + math.sqrt(2.0 * variance * log_t / s) + params.c * 3.0 * params.b * log_t / s


def apply_fidelity_bias(bound: float, zeta: float) -> float:
    """Add the fidelity-induced bias allowance; +inf stays +inf."""
    return bound + zeta
