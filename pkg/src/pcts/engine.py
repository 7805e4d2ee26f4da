"""Main search loop and baselines.

One round of the procrastinated search: refresh every node's optimistic
bound from its delayed statistics, back up the minima, descend the
optimistic path to a leaf, sample a point there, query the oracle at the
depth-scheduled fidelity, collect whatever feedback has arrived, and expand
the selected leaf.  The wait-and-act baseline runs the same machinery but
only acts every tau rounds; random search shares the oracle plumbing only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .benchmarks import Benchmark, get_benchmark
from .partition import PartitionNode, PartitionTree
from .policies import PolicyParams, apply_fidelity_bias, confidence_bound
from .simulator import (
    CostModel,
    DelayModel,
    FidelityModel,
    QueryRecord,
    SimEnvironment,
    fidelity_for_depth,
)

BUDGET_EXHAUSTED_MARKER = "budget exhausted before first query"
NO_DATA_MARKER = "no data"


@dataclass(frozen=True)
class RunConfig:
    """Everything one run needs; a fixed seed makes the run bit-reproducible."""

    benchmark: str
    policy: PolicyParams
    nu1: float = 1.0
    rho: float = 0.95
    delay: DelayModel = field(default_factory=DelayModel.none)
    noise_sigma2: Optional[float] = None  # None: use the benchmark default
    fidelity: FidelityModel = field(default_factory=FidelityModel)
    cost_model: CostModel = field(default_factory=CostModel)
    budget_cost: Optional[float] = None
    budget_rounds: Optional[int] = None
    seed: int = 0
    noise_kind: str = "gaussian"

    def validate(self) -> "RunConfig":
        if (self.budget_cost is None) == (self.budget_rounds is None):
            raise ValueError("set exactly one of budget_cost / budget_rounds")
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie strictly inside (0, 1), got {self.rho}")
        if not self.nu1 > 0.0:
            raise ValueError("nu1 must be > 0")
        if self.noise_sigma2 is not None and self.noise_sigma2 < 0.0:
            raise ValueError("noise_sigma2 must be >= 0")
        self.policy.validate()
        return self


@dataclass(frozen=True)
class RoundRecord:
    """Per-round log entry; tree shape is measured after the round's expansion."""

    t: int
    cumulative_cost: float
    depth: int
    index: int
    point: tuple[float, ...]
    z: float
    feedbacks_received: int
    best_value: float  # best observed (noisy) feedback so far; nan before data
    simple_regret: float  # f_star - f_1(recommended point); nan before data
    tree_height: int
    node_count: int


@dataclass
class RunTrace:
    """Run log plus the final recommendation."""

    config: RunConfig
    records: list[RoundRecord]
    final_point: tuple[float, ...]
    final_observed: float  # noisy feedback value backing the recommendation
    final_value: float  # true full-fidelity value at the recommended point
    final_regret: float
    tree_height: int
    node_count: int
    best_true_value: float = math.nan  # best queried point, measured noiselessly
    best_true_point: Optional[tuple[float, ...]] = None
    marker: str = ""

    @property
    def no_data(self) -> bool:
        return self.marker == NO_DATA_MARKER or self.marker == BUDGET_EXHAUSTED_MARKER

    @property
    def seed(self) -> int:
        return self.config.seed

    def __len__(self) -> int:
        return len(self.records)


def recommend(trace: RunTrace) -> tuple[tuple[float, ...], float]:
    """Recommended point and its observed value (domain center when no data)."""
    return trace.final_point, trace.final_observed


class _Recommendation:
    """Running argmax over observed noisy feedback.

    The reported regret is always measured against the true full-fidelity
    value at the recommended point, so lucky noise cannot go negative.  The
    best queried point by true value is tracked alongside: that is the
    "value of the current best point" statistic the summaries aggregate,
    free of the winner's-curse bias of the noisy argmax.
    """

    def __init__(self, benchmark: Benchmark):
        self._bm = benchmark
        self.point: Optional[tuple[float, ...]] = None
        self.observed = -math.inf
        self.true_value = math.nan
        self.regret = math.nan
        self.best_true_point: Optional[tuple[float, ...]] = None
        self.best_true = -math.inf

    def offer(self, point: tuple[float, ...], value: float) -> None:
        true_value = self._bm.evaluate(point, 1.0)
        if true_value > self.best_true:
            self.best_true = true_value
            self.best_true_point = point
        if self.point is None or value > self.observed:
            self.point = point
            self.observed = value
            self.true_value = true_value
            self.regret = self._bm.f_star - true_value

    @property
    def best_value(self) -> float:
        return self.observed if self.point is not None else math.nan


class _Run:
    """Shared plumbing for the tree-search runners."""

    def __init__(self, config: RunConfig):
        config.validate()
        self.config = config
        self.benchmark = get_benchmark(config.benchmark)
        self.rng = np.random.default_rng(config.seed)
        sigma2 = config.noise_sigma2
        if sigma2 is None:
            sigma2 = self.benchmark.default_sigma2
        self.env = SimEnvironment(
            self.benchmark,
            config.delay,
            config.fidelity,
            config.cost_model,
            math.sqrt(sigma2),
            self.rng,
            noise_kind=config.noise_kind,
        )
        self.tree = PartitionTree(self.benchmark.domain)
        self.rec = _Recommendation(self.benchmark)
        self.records: list[RoundRecord] = []
        # cache of the per-depth fidelity bias added to every bound
        self._bias_by_depth: dict[int, float] = {}

    def fidelity_at(self, depth: int) -> float:
        return fidelity_for_depth(self.config.fidelity, self.config.nu1, self.config.rho, depth)

    def _bias_at(self, depth: int) -> float:
        bias = self._bias_by_depth.get(depth)
        if bias is None:
            bias = self.config.fidelity.bias(self.fidelity_at(depth))
            self._bias_by_depth[depth] = bias
        return bias

    def refresh_bounds(self, t: int) -> None:
        params = self.config.policy
        if self.config.fidelity.enabled:
            def bound_of(node: PartitionNode) -> float:
                return apply_fidelity_bias(
                    confidence_bound(params, node.stats, t), self._bias_at(node.depth)
                )
        else:
            def bound_of(node: PartitionNode) -> float:
                return confidence_bound(params, node.stats, t)
        self.tree.backup_bmin(bound_of, self.config.nu1, self.config.rho)

    def apply_feedback(self, record: QueryRecord) -> None:
        for node in record.path:
            node.stats.record_feedback(record.value)
        self.rec.offer(record.point, record.value)

    def act(self, t: int) -> tuple[PartitionNode, tuple[float, ...], float]:
        """One selection: refresh bounds, descend, sample, query."""
        self.refresh_bounds(t)
        leaf = self.tree.select_optimistic_path(self.rng)
        point = self.tree.sample_point(leaf, self.rng)
        z = self.fidelity_at(leaf.depth)
        self.env.invoke(point, z, t, leaf.path_from_root())
        return leaf, point, z

    def collect(self, t: int) -> int:
        arrived = self.env.collect(t)
        for record in arrived:
            self.apply_feedback(record)
        return len(arrived)

    def record_round(self, t, leaf_depth, leaf_index, point, z, n_feedbacks) -> None:
        height, count = self.tree.statistics()
        self.records.append(
            RoundRecord(
                t=t,
                cumulative_cost=self.env.cumulative_cost,
                depth=leaf_depth,
                index=leaf_index,
                point=point,
                z=z,
                feedbacks_received=n_feedbacks,
                best_value=self.rec.best_value,
                simple_regret=self.rec.regret,
                tree_height=height,
                node_count=count,
            )
        )

    def within_budget(self) -> bool:
        if self.config.budget_rounds is not None:
            return len(self.records) < self.config.budget_rounds
        return self.env.cumulative_cost <= self.config.budget_cost

    def first_step_unaffordable(self) -> bool:
        if self.config.budget_cost is None:
            return False
        return self.config.budget_cost < self.env.step_cost(0, self.fidelity_at(0))

    def finish(self, marker: str = "") -> RunTrace:
        for record in self.env.drain():
            self.apply_feedback(record)
        height, count = self.tree.statistics()
        if self.rec.point is None:
            marker = marker or NO_DATA_MARKER
            return RunTrace(
                config=self.config,
                records=self.records,
                final_point=self.benchmark.domain.center(),
                final_observed=math.nan,
                final_value=math.nan,
                final_regret=math.nan,
                tree_height=height,
                node_count=count,
                marker=marker,
            )
        return RunTrace(
            config=self.config,
            records=self.records,
            final_point=self.rec.point,
            final_observed=self.rec.observed,
            final_value=self.rec.true_value,
            final_regret=self.rec.regret,
            tree_height=height,
            node_count=count,
            best_true_value=self.rec.best_true,
            best_true_point=self.rec.best_true_point,
            marker=marker,
        )


def run_pcts(config: RunConfig) -> RunTrace:
    """Delay-tolerant optimistic tree search under the given budget."""
    run = _Run(config)
    if run.first_step_unaffordable():
        return run.finish(marker=BUDGET_EXHAUSTED_MARKER)
    t = 0
    while run.within_budget():
        t += 1
        leaf, point, z = run.act(t)
        n_arrived = run.collect(t)
        run.tree.expand(leaf)
        run.record_round(t, leaf.depth, leaf.index, point, z, n_arrived)
    return run.finish()


def run_wait_and_act(config: RunConfig) -> RunTrace:
    """Baseline that pauses out the (constant) delay before every selection.

    Only every tau-th clock round performs a selection, so all feedback from
    the previous action has arrived; the trace holds one record per action
    and the effective horizon shrinks by a factor tau.
    """
    if config.delay.kind != "constant":
        raise ValueError("wait-and-act requires a constant delay")
    tau = max(1, config.delay.tau)
    run = _Run(config)
    if run.first_step_unaffordable():
        return run.finish(marker=BUDGET_EXHAUSTED_MARKER)
    clock_limit = config.budget_rounds
    t = 0
    pending_feedbacks = 0
    while True:
        if clock_limit is not None and t >= clock_limit:
            break
        if clock_limit is None and run.env.cumulative_cost > config.budget_cost:
            break
        t += 1
        pending_feedbacks += run.collect(t)
        if (t - 1) % tau == 0:
            leaf, point, z = run.act(t)
            pending_feedbacks += run.collect(t)
            run.tree.expand(leaf)
            run.record_round(t, leaf.depth, leaf.index, point, z, pending_feedbacks)
            pending_feedbacks = 0
    return run.finish()


def run_random_search(config: RunConfig) -> RunTrace:
    """Uniform sampling over the domain at full fidelity, same oracle plumbing."""
    run = _Run(config)
    if config.budget_cost is not None and config.budget_cost < run.env.step_cost(0, 1.0):
        return run.finish(marker=BUDGET_EXHAUSTED_MARKER)
    t = 0
    while run.within_budget():
        t += 1
        point = run.benchmark.domain.sample(run.rng)
        run.env.invoke(point, 1.0, t, ())
        n_arrived = run.collect(t)
        run.record_round(t, 0, 1, point, 1.0, n_arrived)
    return run.finish()
