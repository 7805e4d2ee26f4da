"""Unknown-smoothness wrapper.

Spawns independent search instances over a geometric grid of smoothness
ratios rho_i = rho_max ** (2N / (i + 1)) and returns the instance whose
recommendation scored best, splitting the budget evenly across the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .benchmarks import get_benchmark
from .engine import RunConfig, RunTrace, run_pcts
from .simulator import CostModel, horizon_exact

_MASK64 = (1 << 64) - 1


def derive_instance_seed(master_seed: int, instance: int) -> int:
    """Deterministic per-instance seed (splitmix64 on master + index)."""
    x = (master_seed + 0x9E3779B97F4A7C15 * (instance + 1)) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class MfpooPlan:
    nu_max: float
    rho_max: float
    n_instances: int
    rho_grid: tuple[float, ...]
    budget_per_instance: float

    def __post_init__(self) -> None:
        for rho in self.rho_grid:
            if not 0.0 < rho < 1.0:
                raise ValueError("grid values must lie strictly inside (0, 1)")
        if list(self.rho_grid) != sorted(self.rho_grid):
            raise ValueError("grid must be sorted ascending")


def _grid_size(t_hat: int, rho_max: float) -> int:
    if t_hat < 3:
        return 1
    n = (0.5 * math.log(2.0) / math.log(1.0 / rho_max)) * math.log(t_hat / math.log(t_hat))
    return max(1, math.ceil(n))


def _grid(rho_max: float, n: int, include_rho_max: bool) -> tuple[float, ...]:
    grid = [rho_max ** (2.0 * n / (i + 1.0)) for i in range(1, n + 1)]
    if include_rho_max and (not grid or grid[-1] < rho_max):
        grid.append(rho_max)
    return tuple(grid)


def plan_instances(
    nu_max: float,
    rho_max: float,
    budget: float,
    cost_model: CostModel,
    lam1: float,
    include_rho_max: bool = False,
) -> MfpooPlan:
    """Lay out the grid for a cost budget.

    The instance count follows the geometric line-search rule
    N = ceil((0.5 ln 2 / ln(1/rho_max)) * ln(T / ln T)) with T the horizon
    affordable under the cost model; the budget is split evenly.
    """
    if not 0.0 < rho_max < 1.0:
        raise ValueError("rho_max must lie strictly inside (0, 1)")
    if not budget > lam1:
        raise ValueError("budget must exceed one full-fidelity evaluation")
    if cost_model.kind == "benchmark":
        # concrete cost curves depend on the fidelity schedule; pricing every
        # step at the full-fidelity cost gives a conservative horizon
        t_hat = horizon_exact(CostModel("constant", lam1), budget, lam1)
    else:
        t_hat = horizon_exact(cost_model, budget, lam1)
    n = _grid_size(t_hat, rho_max)
    grid = _grid(rho_max, n, include_rho_max)
    return MfpooPlan(nu_max, rho_max, len(grid), grid, budget / len(grid))


def run_mfpoo(
    config: RunConfig,
    nu_max: float,
    rho_max: float,
    include_rho_max: bool = False,
) -> tuple[RunTrace, list[RunTrace]]:
    """Run one search instance per grid rho and keep the best outcome.

    Instances use nu1 = nu_max, an even budget split, and per-instance seeds
    derived from the master seed, so execution order cannot matter.  The
    winner is the instance whose recommendation has the highest observed
    value; all traces are returned alongside it.
    """
    if not 0.0 < rho_max < 1.0:
        raise ValueError("rho_max must lie strictly inside (0, 1)")
    if config.budget_rounds is not None:
        t_hat = config.budget_rounds
        grid = _grid(rho_max, _grid_size(t_hat, rho_max), include_rho_max)
        per_budget = {"budget_rounds": max(1, config.budget_rounds // len(grid))}
    else:
        bench = get_benchmark(config.benchmark)
        plan = plan_instances(
            nu_max, rho_max, config.budget_cost, config.cost_model,
            bench.cost(1.0), include_rho_max,
        )
        grid = plan.rho_grid
        per_budget = {"budget_cost": plan.budget_per_instance}

    traces = []
    for i, rho in enumerate(grid):
        cfg = replace(
            config,
            nu1=nu_max,
            rho=rho,
            seed=derive_instance_seed(config.seed, i),
            **per_budget,
        )
        traces.append(run_pcts(cfg))

    def score(trace: RunTrace) -> float:
        return -math.inf if trace.no_data else trace.final_observed

    best = max(traces, key=score)
    return best, traces
