"""Top-k tracking with an adaptively sized sample.

Two independent collections are kept.  ``R`` decides the sample size: it
grows until its top fraction drops below ``x - eps`` (so ``x n`` bounds the
largest influence from above) and sheds surplus sets when influence falls.
``R1`` always matches ``|R|`` and is the only collection used to select
nodes; sizing never reads it.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DegenerateQuantile, InvalidConfig
from .graph import DynamicGraph, Model, WeightUpdate
from .report import TrackerReport
from .rng import spawn_randoms
from .rr_lt import MaintenanceCost
from .rrindex import RRCollection
from .tracker import GENERATORS, MAINTAINERS, min_degree_for, validate


@dataclass(frozen=True)
class TopKConfig:
    k: int
    epsilon: float
    delta: float

    def validate(self, n: int) -> None:
        if n < 1:
            raise InvalidConfig("graph has no nodes")
        if not 1 <= self.k <= n:
            raise InvalidConfig(f"k must lie in [1, n={n}], got {self.k}")
        if not 0 < self.epsilon < 1:
            raise InvalidConfig(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise InvalidConfig(f"delta must lie in (0, 1), got {self.delta}")


def trivial_imax_lower_bound(g: DynamicGraph) -> float:
    """``max_u 1 + sum_v p_uv``: a node reaches each out-neighbour directly at least that often."""
    acc = [1.0] * g.n
    lt = g.model is Model.LT
    for v, adj in enumerate(g.in_adj):
        W = g.total_weight[v] if lt else 1.0
        if W <= 0:
            continue
        for u, w in adj.items():
            acc[u] += w / W
    return max(acc) if acc else 0.0


def refined_filter_threshold(f_k: float, x: float, epsilon: float) -> float:
    """``theta = F^k - eps/4 - eps1/2`` with ``eps1 = eps * sqrt((F^k - eps/4) / (4x))``.

    ``eps1`` is capped at ``eps/2`` so the result never falls below
    ``F^k - eps/2``.
    """
    rad = f_k - epsilon / 4.0
    if rad < 0:
        raise DegenerateQuantile(f"F^k = {f_k} is below eps/4 = {epsilon / 4}")
    if x <= 0:
        raise InvalidConfig("x must be positive")
    eps1 = min(epsilon * math.sqrt(rad / (4.0 * x)), epsilon / 2.0)
    return f_k - epsilon / 4.0 - eps1 / 2.0


def filter_threshold(f_k: float, x: float, epsilon: float) -> float:
    """Refined threshold, or ``max(F^k - eps/2, 0)`` when ``F^k < eps/4``."""
    try:
        return refined_filter_threshold(f_k, x, epsilon)
    except DegenerateQuantile:
        return max(f_k - epsilon / 2.0, 0.0)


class TopKTracker:
    """Adaptive top-k tracker.

    ``resize_every`` batches the grow/shrink step; 1 (the default) resizes
    after every update.
    """

    def __init__(self, graph: DynamicGraph, config: TopKConfig, seed: int | None = None,
                 resize_every: int = 1):
        config.validate(graph.n)
        if resize_every < 1:
            raise InvalidConfig("resize_every must be >= 1")
        self.graph = graph
        self.config = config
        self.resize_every = resize_every
        n = graph.n
        eps = config.epsilon
        self.log_term = math.log(2.0 * n / config.delta)
        # |R| >= 192/eps * ln(2n/delta), i.e. x >= 4 eps
        self.floor = 192.0 / eps * self.log_term
        lb = trivial_imax_lower_bound(graph)
        if eps > lb / (2.0 * n):
            warnings.warn(
                f"epsilon={eps} exceeds I_max lower bound / 2n = {lb / (2 * n):.3g}; "
                "the bound on x n is dominated by the 4 eps n floor",
                stacklevel=2,
            )
        self.rng_R, self.rng_R1 = spawn_randoms(seed, 2)
        self._gen = GENERATORS[graph.model]
        self._maintain = MAINTAINERS[graph.model]
        self.R = RRCollection(n)
        self.R1 = RRCollection(n)
        self.t = 0
        self.updates = 0
        self._pending = 0
        self.resize()

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def M(self) -> int:
        return len(self.R)

    @property
    def x(self) -> float:
        return len(self.R) * self.config.epsilon ** 2 / (48.0 * self.log_term)

    # ---- sizing (reads R only) -------------------------------------------

    def _add_R(self) -> None:
        self.R.add(self._gen(self.graph, self.rng_R))

    def grow_to_sufficiency(self) -> int:
        """Add sets to R until ``F_R* < x - eps``; return how many were added."""
        R = self.R
        eps = self.config.epsilon
        before = len(R)
        while len(R) < self.floor:
            self._add_R()
        while R.max_fraction() >= self.x - eps:
            self._add_R()
        return len(R) - before

    def shrink_if_redundant(self) -> int:
        """Drop trailing sets of R while they are surplus; return how many went."""
        R = self.R
        eps = self.config.epsilon
        before = len(R)
        while len(R) > self.floor and R.max_fraction() < self.x - eps:
            sid, rr = R.pop_last()
            if len(R) < self.floor or R.max_fraction() >= self.x - eps:
                R.register(sid, rr)
                break
        return before - len(R)

    def match_selection(self) -> None:
        """Bring ``|R1|`` to ``|R|`` with fresh sets or by dropping the newest."""
        R1 = self.R1
        target = len(self.R)
        while len(R1) < target:
            R1.add(self._gen(self.graph, self.rng_R1))
        while len(R1) > target:
            R1.pop_last()

    def resize(self) -> None:
        self.grow_to_sufficiency()
        self.shrink_if_redundant()
        self.match_selection()
        self._pending = 0

    # ---- stream ----------------------------------------------------------

    def process_update(self, upd: WeightUpdate) -> tuple[MaintenanceCost, MaintenanceCost]:
        d = self.graph.apply_update(upd)
        c1 = self._maintain(self.R, self.graph, d, self.rng_R)
        c2 = self._maintain(self.R1, self.graph, d, self.rng_R1)
        self.t = upd.t
        self.updates += 1
        self._pending += 1
        if self._pending >= self.resize_every:
            self.resize()
        return c1, c2

    # ---- selection (reads R1 only) ----------------------------------------

    def theta(self) -> float:
        f_k = self.R1.kth_fraction(self.config.k)
        return filter_threshold(f_k, self.x, self.config.epsilon)

    def report(self) -> TrackerReport:
        if self._pending:
            self.resize()
        R1 = self.R1
        M = len(R1)
        n = self.n
        theta = self.theta()
        deg = R1.ranking.degree
        dmin = min_degree_for(theta, M)
        nodes = [(u, n * deg[u] / M) for u in R1.nodes_with_degree_at_least(dmin)]
        c = self.config
        return TrackerReport(self.t, "topk", nodes, M, c.epsilon, c.delta,
                             k=c.k, x=self.x, theta=theta)

    def validate(self) -> None:
        validate(self.R, self.graph)
        validate(self.R1, self.graph)
        if len(self.R) != len(self.R1):
            raise AssertionError("|R| != |R1|")
