"""Threshold tracking: report every node whose influence may reach ``T``."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyCollection, InvalidConfig, SampleSizeMismatch
from .graph import DynamicGraph
from .report import TrackerReport
from .rrindex import RRCollection
from .tracker import InfluenceTracker, min_degree_for


@dataclass(frozen=True)
class ThresholdConfig:
    T: float
    epsilon: float
    delta: float

    def validate(self, n: int) -> None:
        _check(n, self.T, self.epsilon, self.delta)


def _check(n: int, T: float, epsilon: float, delta: float) -> None:
    if n < 1:
        raise InvalidConfig("graph has no nodes")
    if not 0 < epsilon < 1:
        raise InvalidConfig(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < delta < 1:
        raise InvalidConfig(f"delta must lie in (0, 1), got {delta}")
    if not 0 < T <= n:
        raise InvalidConfig(f"T must lie in (0, n={n}], got {T}")
    if not epsilon * n < T:
        raise InvalidConfig(f"epsilon*n = {epsilon * n} must be below T = {T}")


def sample_size_bound(n: int, T: float, epsilon: float, delta: float) -> float:
    """``12 T / (n eps^2) * ln(2n / delta)`` before rounding up."""
    _check(n, T, epsilon, delta)
    return 12.0 * T / (n * epsilon * epsilon) * math.log(2.0 * n / delta)


def required_sample_size(n: int, T: float, epsilon: float, delta: float) -> int:
    return math.ceil(sample_size_bound(n, T, epsilon, delta))


class ThresholdTracker(InfluenceTracker):
    """Fixed-size tracker whose report holds every node with ``n F >= T - eps n / 2``.

    With probability at least ``1 - delta`` per report, all nodes with
    influence ``>= T`` are included and none below ``T - eps n`` are.
    """

    def __init__(self, graph: DynamicGraph, config: ThresholdConfig, seed: int | None = None,
                 size: int | None = None):
        config.validate(graph.n)
        self.config = config
        self.required = required_sample_size(graph.n, config.T, config.epsilon, config.delta)
        super().__init__(graph, size if size is not None else self.required, seed)

    @property
    def cutoff(self) -> float:
        """Reporting threshold in influence units."""
        return self.config.T - self.config.epsilon * self.n / 2.0

    def report(self, strict: bool = True) -> TrackerReport:
        M = self.M
        if strict and M != self.required:
            raise SampleSizeMismatch(f"|R| = {M} but the guarantee needs M = {self.required}")
        nodes = select_at_least(self.collection, self.n, self.cutoff)
        c = self.config
        return TrackerReport(self.t, "threshold", nodes, M, c.epsilon, c.delta, T=c.T)


def select_at_least(coll: RRCollection, n: int, cutoff: float) -> list[tuple[int, float]]:
    """Nodes with ``n * D(u) / M >= cutoff`` and their estimates, ranked."""
    M = len(coll)
    if M == 0:
        raise EmptyCollection("collection is empty")
    dmin = min_degree_for(cutoff / n, M)
    # settle on the estimate exactly as reported so rounding cannot split them
    while dmin > 0 and n * (dmin - 1) / M >= cutoff:
        dmin -= 1
    while n * dmin / M < cutoff:
        dmin += 1
    deg = coll.ranking.degree
    return [(u, n * deg[u] / M) for u in coll.nodes_with_degree_at_least(dmin)]
