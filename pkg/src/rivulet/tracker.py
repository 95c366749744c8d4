"""Model dispatch and the fixed-size tracking loop shared by both trackers."""
from __future__ import annotations

import random
from typing import Any, Callable

from .graph import DynamicGraph, Model, UpdateDelta, WeightUpdate
from .rng import make_random
from .rr_ic import check_ic_set, generate_ic, maintain_ic
from .rr_lt import MaintenanceCost, check_lt_set, generate_lt, maintain_lt
from .rrindex import RRCollection

Generator = Callable[[DynamicGraph, random.Random], Any]
Maintainer = Callable[[RRCollection, DynamicGraph, UpdateDelta, random.Random], MaintenanceCost]

GENERATORS: dict[Model, Generator] = {Model.LT: generate_lt, Model.IC: generate_ic}
MAINTAINERS: dict[Model, Maintainer] = {Model.LT: maintain_lt, Model.IC: maintain_ic}
CHECKERS = {Model.LT: check_lt_set, Model.IC: check_ic_set}


def fill(coll: RRCollection, g: DynamicGraph, count: int, rng: random.Random) -> None:
    """Append ``count`` fresh RR sets sampled on the current graph."""
    gen = GENERATORS[g.model]
    for _ in range(count):
        coll.add(gen(g, rng))


def validate(coll: RRCollection, g: DynamicGraph) -> None:
    """Full structural check: every set against the graph, then the index."""
    chk = CHECKERS[g.model]
    for rr in coll.sets.values():
        chk(rr, g)
    coll.check()


class InfluenceTracker:
    """A constant-size RR sample kept unbiased as the graph changes.

    This is the plain tracking loop; ``ThresholdTracker`` adds the sample
    size rule and the reporting filter.
    """

    def __init__(self, graph: DynamicGraph, size: int, seed: int | None = None,
                 rng: random.Random | None = None):
        if size < 1:
            raise ValueError("sample size must be positive")
        self.graph = graph
        self.size = size
        self.rng = rng if rng is not None else make_random(seed)
        self.collection = RRCollection(graph.n)
        self._maintain = MAINTAINERS[graph.model]
        fill(self.collection, graph, size, self.rng)
        self.t = 0
        self.updates = 0

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def M(self) -> int:
        return len(self.collection)

    def process_update(self, upd: WeightUpdate) -> MaintenanceCost:
        d = self.graph.apply_update(upd)
        cost = self._maintain(self.collection, self.graph, d, self.rng)
        self.t = upd.t
        self.updates += 1
        return cost

    def estimate(self, u: int) -> float:
        """``n * F_R(u)``, the unbiased estimate of u's influence spread."""
        return self.n * self.collection.fraction(u)

    def estimates(self) -> list[float]:
        M = self.M
        n = self.n
        return [n * d / M for d in self.collection.ranking.degree]

    def validate(self) -> None:
        validate(self.collection, self.graph)


def min_degree_for(cutoff_frac: float, M: int) -> int:
    """Smallest degree ``D`` with ``D / M >= cutoff_frac`` (computed as compared)."""
    if cutoff_frac <= 0:
        return 0
    d = max(0, int(cutoff_frac * M) - 1)
    while d / M < cutoff_frac:
        d += 1
    return d
