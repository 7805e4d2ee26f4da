"""Binary partition tree over a box domain, with delay-aware node statistics.

The tree realizes a hierarchical partition by bisecting, at each expansion,
the side with the largest length relative to the root domain (lowest dimension
index on ties).  Every node keeps counts of queries issued through it
(``invoked``), feedbacks received (``observed``), and running sums for mean
and variance estimates; under delayed feedback ``observed`` lags ``invoked``
by the number of outstanding queries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class Box:
    """Axis-aligned box: one (lower, upper) interval per dimension."""

    lows: tuple[float, ...]
    highs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lows) != len(self.highs):
            raise ValueError("lows and highs must have equal length")
        for lo, hi in zip(self.lows, self.highs):
            if not lo <= hi:
                raise ValueError(f"empty interval [{lo}, {hi}]")

    @property
    def dim(self) -> int:
        return len(self.lows)

    def side_lengths(self) -> tuple[float, ...]:
        return tuple(hi - lo for lo, hi in zip(self.lows, self.highs))

    def center(self) -> tuple[float, ...]:
        return tuple(0.5 * (lo + hi) for lo, hi in zip(self.lows, self.highs))

    def contains(self, point) -> bool:
        if len(point) != self.dim:
            return False
        return all(lo <= x <= hi for x, lo, hi in zip(point, self.lows, self.highs))

    def halves(self, dim: int) -> tuple["Box", "Box"]:
        """Split into two closed halves along ``dim`` (shared midpoint face)."""
        mid = 0.5 * (self.lows[dim] + self.highs[dim])
        lower = Box(self.lows, self.highs[:dim] + (mid,) + self.highs[dim + 1 :])
        upper = Box(self.lows[:dim] + (mid,) + self.lows[dim + 1 :], self.highs)
        return lower, upper

    def sample(self, rng: np.random.Generator) -> tuple[float, ...]:
        """Uniform point; coordinates drawn in dimension order."""
        u = rng.random(self.dim)
        return tuple(lo + ui * (hi - lo) for ui, lo, hi in zip(u, self.lows, self.highs))


@dataclass
class NodeStats:
    """Play/observation counters for one node under delayed feedback.

    ``invoked`` counts queries whose root-to-leaf path includes the node,
    ``observed`` counts feedbacks that have arrived; the gap is the number of
    feedbacks still in flight.  ``sum`` and ``sum_sq`` accumulate observed
    feedback values for the mean/variance estimates.
    """

    invoked: int = 0
    observed: int = 0
    sum: float = 0.0
    sum_sq: float = 0.0

    @property
    def missing(self) -> int:
        return self.invoked - self.observed

    def record_invoke(self) -> None:
        self.invoked += 1

    def record_feedback(self, value: float) -> None:
        self.observed += 1
        self.sum += value
        self.sum_sq += value * value


class PartitionNode:
    """Node (h, l): depth ``h`` (root 0), index ``l`` in [1, 2^h]."""

    __slots__ = ("depth", "index", "box", "parent", "children", "stats", "b_value", "b_min")

    def __init__(self, depth: int, index: int, box: Box, parent: Optional["PartitionNode"] = None):
        self.depth = depth
        self.index = index
        self.box = box
        self.parent = parent
        self.children: list[PartitionNode] = []
        self.stats = NodeStats()
        self.b_value = math.inf
        self.b_min = math.inf

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def path_from_root(self) -> tuple["PartitionNode", ...]:
        path = []
        node: Optional[PartitionNode] = self
        while node is not None:
            path.append(node)
            node = node.parent
        return tuple(reversed(path))

    def __repr__(self) -> str:  # pragma: no cover
        return f"PartitionNode(h={self.depth}, l={self.index})"


class PartitionTree:
    """Binary partition of a box domain with optimistic-value backup."""

    def __init__(self, domain: Box):
        self.domain = domain
        self._root_sides = domain.side_lengths()
        self.root = PartitionNode(0, 1, domain)
        # insertion order puts children after parents: a topological order
        self.nodes: list[PartitionNode] = [self.root]
        self.height = 0

    def __len__(self) -> int:
        return len(self.nodes)

    def split_dimension(self, node: PartitionNode) -> int:
        """Dimension with the largest domain-normalized side, lowest index on ties."""
        best_dim, best_len = 0, -1.0
        for d, (side, root_side) in enumerate(zip(node.box.side_lengths(), self._root_sides)):
            rel = side / root_side if root_side > 0.0 else 0.0
            if rel > best_len:
                best_dim, best_len = d, rel
        return best_dim

    def expand(self, leaf: PartitionNode) -> tuple[PartitionNode, PartitionNode]:
        """Bisect ``leaf`` into two children with fresh (all-zero) statistics."""
        if leaf.children:
            raise ValueError(f"cannot expand non-leaf node {leaf!r}")
        dim = self.split_dimension(leaf)
        lower, upper = leaf.box.halves(dim)
        left = PartitionNode(leaf.depth + 1, 2 * leaf.index - 1, lower, parent=leaf)
        right = PartitionNode(leaf.depth + 1, 2 * leaf.index, upper, parent=leaf)
        leaf.children = [left, right]
        self.nodes.append(left)
        self.nodes.append(right)
        self.height = max(self.height, leaf.depth + 1)
        return left, right

    def backup_bmin(self, bound_of: Callable[[PartitionNode], float], nu1: float, rho: float) -> None:
        """Recompute b-values and back up minima bottom-up in one pass.

        Leaves get ``bound + nu1 * rho**h``; internal nodes additionally cap
        by the best child minimum.  ``+inf`` is absorbing under the addition.
        """
        for node in reversed(self.nodes):
            bound = bound_of(node)
            node.b_value = bound
            own = bound + nu1 * rho**node.depth
            if node.children:
                node.b_min = min(own, max(child.b_min for child in node.children))
            else:
                node.b_min = own

    def select_optimistic_path(self, rng: np.random.Generator) -> PartitionNode:
        """Descend to a leaf, following the child with the larger backed-up minimum.

        Exact ties (including the common +inf vs +inf case) are broken
        uniformly at random, so the walk is reproducible under a fixed seed.
        """
        node = self.root
        while node.children:
            left, right = node.children
            if left.b_min > right.b_min:
                node = left
            elif right.b_min > left.b_min:
                node = right
            else:
                node = node.children[int(rng.integers(2))]
        return node

    def sample_point(self, node: PartitionNode, rng: np.random.Generator) -> tuple[float, ...]:
        """Uniform point in the node's subdomain."""
        return node.box.sample(rng)

    def statistics(self) -> tuple[int, int]:
        """(maximum depth, total node count), root included."""
        return self.height, len(self.nodes)
