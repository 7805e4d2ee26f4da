"""Discrete-event oracle environment.

Evaluates a benchmark at a requested fidelity, adds noise, and holds the
feedback in a pending queue until its arrival round.  Also owns the cost
ledger, the per-depth fidelity schedule, and the closed-form / iterative
horizon helpers for the abstract cost models.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .partition import PartitionNode


# ---------------------------------------------------------------------------
# delay


@dataclass(frozen=True)
class DelayModel:
    """Feedback delay in selection rounds: none, constant, or geometric."""

    kind: str = "none"  # none | constant | geometric
    tau: int = 0
    mean: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("none", "constant", "geometric"):
            raise ValueError(f"unknown delay kind {self.kind!r}")
        if self.kind == "constant" and self.tau < 0:
            raise ValueError("constant delay needs tau >= 0")
        if self.kind == "geometric" and self.mean < 1.0:
            raise ValueError("geometric delay needs mean >= 1")

    @staticmethod
    def none() -> "DelayModel":
        return DelayModel("none")

    @staticmethod
    def constant(tau: int) -> "DelayModel":
        return DelayModel("constant", tau=tau)

    @staticmethod
    def geometric(mean: float) -> "DelayModel":
        return DelayModel("geometric", mean=mean)

    @staticmethod
    def parse(text: str) -> "DelayModel":
        """Parse the CLI form: ``none``, ``const:N``, or ``geo:MEAN``."""
        text = text.strip().lower()
        if text == "none":
            return DelayModel.none()
        if text.startswith("const:"):
            return DelayModel.constant(int(text.split(":", 1)[1]))
        if text.startswith("geo:"):
            return DelayModel.geometric(float(text.split(":", 1)[1]))
        raise ValueError(f"cannot parse delay spec {text!r}")

    def describe(self) -> str:
        if self.kind == "none":
            return "none"
        if self.kind == "constant":
            return f"const:{self.tau}"
        return f"geo:{self.mean:g}"


def sample_delay(model: DelayModel, rng: np.random.Generator) -> int:
    """Delay in rounds; geometric is supported on {1, 2, ...} with mean ``mean``."""
    if model.kind == "none":
        return 0
    if model.kind == "constant":
        return model.tau
    return int(rng.geometric(1.0 / model.mean))


# ---------------------------------------------------------------------------
# fidelity and cost


@dataclass(frozen=True)
class FidelityModel:
    """Linear bias model: querying at fidelity z costs accuracy zeta0 * (1 - z)."""

    zeta0: float = 0.1
    enabled: bool = False

    def bias(self, z: float) -> float:
        if not self.enabled:
            return 0.0
        return self.zeta0 * (1.0 - z)


def fidelity_for_depth(fm: FidelityModel, nu1: float, rho: float, h: int) -> float:
    """Fidelity schedule matching bias to the depth-h cell diameter.

    Inverts zeta(z) = zeta0 * (1 - z) at nu1 * rho**h, clamped to [0, 1].
    A disabled model (or degenerate zeta0 = 0) always evaluates in full.
    """
    if not fm.enabled or fm.zeta0 <= 0.0:
        return 1.0
    z = 1.0 - nu1 * rho**h / fm.zeta0
    return min(1.0, max(0.0, z))


@dataclass(frozen=True)
class CostModel:
    """Per-step evaluation cost.

    ``benchmark`` charges the benchmark's own lambda(z); the abstract variants
    charge a depth-indexed schedule, each capped at the full-fidelity cost.
    """

    kind: str = "benchmark"  # benchmark | linear | constant | poly | exp
    beta: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("benchmark", "linear", "constant", "poly", "exp"):
            raise ValueError(f"unknown cost model {self.kind!r}")
        if self.kind in ("linear", "constant") and not self.beta > 0.0:
            raise ValueError("beta must be > 0")
        if self.kind == "poly" and (not self.beta > 0.0 or self.beta == 1.0):
            raise ValueError("poly cost needs beta > 0, beta != 1")
        if self.kind == "exp" and not 0.0 < self.beta <= 1.0:
            raise ValueError("exp cost needs beta in (0, 1]")

    def raw_step_cost(self, h: int) -> float:
        """Uncapped abstract cost at step/depth h >= 1."""
        if self.kind == "linear":
            return self.beta * h
        if self.kind == "constant":
            return self.beta
        if self.kind == "poly":
            return h ** (-self.beta)
        if self.kind == "exp":
            return self.beta ** (-h)
        raise ValueError("benchmark cost model has no abstract step cost")

    def step_cost(self, h: int, z: float, lam_of_z, lam1: float) -> float:
        """Cost charged for one query at depth h and fidelity z."""
        if self.kind == "benchmark":
            return lam_of_z(z)
        # depth 0 (the very first selection, at the root) is charged as step 1
        return min(self.raw_step_cost(max(h, 1)), lam1)


def horizon_exact(cm: CostModel, budget: float, lam1: float, max_steps: int = 10_000_000) -> int:
    """Largest H with sum of capped per-step costs over h = 1..H within budget."""
    if cm.kind == "benchmark":
        raise ValueError("horizon helpers apply to the abstract cost models only")
    total = 0.0
    h = 0
    while h < max_steps:
        cost = min(cm.raw_step_cost(h + 1), lam1)
        if total + cost > budget:
            return h
        total += cost
        h += 1
    raise RuntimeError(f"budget not exhausted within {max_steps} steps")


def horizon_lower_bound(cm: CostModel, budget: float, lam1: float) -> float:
    """Closed-form lower bound on the affordable horizon for a cost budget."""
    if not budget > 0.0 or not lam1 > 0.0:
        raise ValueError("need budget > 0 and lam1 > 0")
    eff = 2.0 * budget - lam1
    beta = cm.beta
    if cm.kind == "linear":
        return math.sqrt(2.0 * eff / beta)
    if cm.kind == "constant":
        return eff / beta
    if cm.kind == "poly":
        base = 1.0 + (1.0 - beta) * eff
        if base <= 0.0:
            raise ValueError("horizon bound undefined: nonpositive base for poly cost")
        return base ** (1.0 / (1.0 - beta))
    if cm.kind == "exp":
        if beta == 1.0:
            return eff  # unit costs in the limit
        return math.log(1.0 + (1.0 - beta) * eff) / math.log(1.0 / beta)
    raise ValueError("horizon helpers apply to the abstract cost models only")


# ---------------------------------------------------------------------------
# environment


@dataclass
class QueryRecord:
    """One in-flight (or delivered) oracle query."""

    id: int
    origin_round: int
    path: tuple[PartitionNode, ...]
    point: tuple[float, ...]
    z: float
    value: float  # noisy feedback, hidden until arrival
    arrival_round: int

    def __post_init__(self) -> None:
        if self.arrival_round < self.origin_round:
            raise ValueError("feedback cannot arrive before its query")


_NOISE_KINDS = ("gaussian", "laplace", "uniform")


class SimEnvironment:
    """Oracle wrapper: evaluation, noise, delayed delivery, and cost ledger.

    One environment serves one run and is not shared across runs.  Delays are
    drawn at invoke time, before the feedback value could influence anything.
    """

    def __init__(
        self,
        benchmark,
        delay: DelayModel,
        fidelity: FidelityModel,
        cost_model: CostModel,
        noise_sigma: float,
        rng: np.random.Generator,
        noise_kind: str = "gaussian",
    ):
        if noise_kind not in _NOISE_KINDS:
            raise ValueError(f"unknown noise kind {noise_kind!r}")
        if noise_sigma < 0.0:
            raise ValueError("noise sigma must be >= 0")
        self.benchmark = benchmark
        self.delay = delay
        self.fidelity = fidelity
        self.cost_model = cost_model
        self.noise_sigma = noise_sigma
        self.noise_kind = noise_kind
        self.rng = rng
        self.cumulative_cost = 0.0
        self._pending: list[tuple[int, int, QueryRecord]] = []
        self._next_id = 0

    @property
    def pending_count(self) -> int:
        return len(self._pending)

    def step_cost(self, h: int, z: float) -> float:
        return self.cost_model.step_cost(h, z, self.benchmark.cost, self.benchmark.cost(1.0))

    def _draw_noise(self) -> float:
        s = self.noise_sigma
        if self.noise_kind == "gaussian":
            return float(self.rng.normal(0.0, s))
        if self.noise_kind == "laplace":
            return float(self.rng.laplace(0.0, s / math.sqrt(2.0)))
        return float(self.rng.uniform(-s * math.sqrt(3.0), s * math.sqrt(3.0)))

    def invoke(
        self,
        point: tuple[float, ...],
        z: float,
        t: int,
        path: tuple[PartitionNode, ...],
    ) -> int:
        """Query the oracle; returns the query id.

        Charges the cost ledger, increments ``invoked`` along the whole path,
        and enqueues the noisy feedback for delivery at ``t + delay``.
        """
        if not self.benchmark.domain.contains(point):
            raise ValueError(f"point {point} outside benchmark domain")
        if not 0.0 <= z <= 1.0:
            raise ValueError(f"fidelity must lie in [0, 1], got {z}")
        value = self.benchmark.evaluate(point, z) + self._draw_noise()
        arrival = t + sample_delay(self.delay, self.rng)
        depth = path[-1].depth if path else 0
        self.cumulative_cost += self.step_cost(depth, z)
        for node in path:
            node.stats.record_invoke()
        record = QueryRecord(self._next_id, t, path, point, z, value, arrival)
        heapq.heappush(self._pending, (arrival, record.id, record))
        self._next_id += 1
        return record.id

    def collect(self, t: int) -> list[QueryRecord]:
        """Remove and return every pending record with arrival_round <= t.

        The caller applies each record's value along its stored path.
        """
        out = []
        while self._pending and self._pending[0][0] <= t:
            out.append(heapq.heappop(self._pending)[2])
        return out

    def drain(self) -> list[QueryRecord]:
        """Hand over everything still in flight (end-of-run bookkeeping)."""
        out = [entry[2] for entry in sorted(self._pending)]
        self._pending.clear()
        return out
