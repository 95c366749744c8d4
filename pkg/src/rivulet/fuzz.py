"""Randomised structural checking across graph, RR maintenance and index.

Every operation is followed by a full re-validation: RR sets against the
graph (simple LT paths, IC reachability and labels), the inverted index
and degree ranking against a from-scratch rebuild, and LT total weights
against recomputation.
"""
from __future__ import annotations

import math
import random
import time
from collections import Counter
from dataclasses import dataclass, field

from .graph import DynamicGraph, Model, WeightUpdate
from .rrindex import RRCollection
from .tracker import InfluenceTracker


def random_update(g: DynamicGraph, rng: random.Random, t: int, allow_self: bool = True) -> WeightUpdate | None:
    """A valid random update for ``g``, or None when the draw is unusable."""
    n = g.n
    u, v = rng.randrange(n), rng.randrange(n)
    ic = g.model is Model.IC
    if u == v and (ic or not allow_self):
        return None
    w = g.weight(u, v)
    if w > 0 and rng.random() < 0.45:
        delta = w if rng.random() < 0.3 else w * (1.0 - rng.random())
        return WeightUpdate(t, u, v, -1, delta)
    if ic:
        room = 1.0 - w
        if room <= 1e-9:
            return None
        delta = room if rng.random() < 0.1 else room * (1.0 - rng.random())
    else:
        delta = (1.0 - rng.random()) * 2.0
    return WeightUpdate(t, u, v, 1, delta)


def check_graph(g: DynamicGraph) -> None:
    for v in range(g.n):
        adj = g.in_adj[v]
        if any(not w > 0 for w in adj.values()):
            raise AssertionError(f"non-positive stored weight into {v}")
        if v in adj:
            raise AssertionError(f"self-loop stored as edge at {v}")
        if g.model is Model.IC:
            if any(w > 1.0 for w in adj.values()):
                raise AssertionError(f"IC weight above 1 into {v}")
        else:
            exact = g.self_weight[v] + math.fsum(adj.values())
            if not math.isclose(g.total_weight[v], exact, rel_tol=1e-9, abs_tol=1e-12):
                raise AssertionError(f"W_{v} = {g.total_weight[v]} but recomputed {exact}")


@dataclass
class FuzzReport:
    operations: int = 0
    kinds: Counter = field(default_factory=Counter)
    violations: int = 0
    examples: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def record(self, kind: str, exc: Exception) -> None:
        self.violations += 1
        if len(self.examples) < 20:
            self.examples.append(f"op {self.operations} ({kind}): {exc}")


class _Index:
    """Standalone collection driven by raw register/unregister/diff calls."""

    def __init__(self, n: int, rng: random.Random):
        self.n = n
        self.rng = rng
        self.coll = RRCollection(n)

    def step(self) -> None:
        c, r, n = self.coll, self.rng, self.n
        roll = r.random()
        if not c.sets or roll < 0.35:
            c.add(r.sample(range(n), r.randint(0, n)))
        elif roll < 0.55:
            c.unregister(r.choice(list(c.sets)))
        elif roll < 0.65:
            sid, payload = c.pop_last()
            if r.random() < 0.5:
                c.register(sid, payload)
        else:
            sid = r.choice(list(c.sets))
            cur = c.sets[sid]
            removed = [x for x in cur if r.random() < 0.4]
            added = [x for x in range(n) if x not in cur and r.random() < 0.3]
            c.diff_membership(sid, removed, added)
        c.check()
        if c.sets:
            deg = [len(s) for s in c.inverted]
            if c.ranking.max_degree() != max(deg):
                raise AssertionError("max degree differs from brute force")


def _fresh_tracker(model: Model, n: int, sets: int, rng: random.Random) -> InfluenceTracker:
    g = DynamicGraph(n, model)
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < 0.4:
                g.add_weight(u, v, rng.uniform(0.05, 0.95) if model is Model.IC else rng.uniform(0.1, 2.0))
    if model is Model.LT:
        for v in range(n):
            if rng.random() < 0.7:
                g.add_weight(v, v, rng.uniform(0.1, 1.0))
    return InfluenceTracker(g, sets, rng=random.Random(rng.getrandbits(64)))


def run_fuzz(operations: int, seed: int = 0, n: int = 6, sets: int = 8,
             reset_every: int = 2000) -> FuzzReport:
    """Run ``operations`` random operations, re-validating after each one."""
    rng = random.Random(seed)
    rep = FuzzReport()
    trackers = {m: _fresh_tracker(m, n, sets, rng) for m in Model}
    index = _Index(n, rng)
    t0 = time.perf_counter()
    clock = 0
    while rep.operations < operations:
        kind = rng.choice(("lt", "ic", "index"))
        rep.operations += 1
        rep.kinds[kind] += 1
        try:
            if kind == "index":
                index.step()
                if rep.operations % reset_every == 0:
                    index = _Index(rng.randint(1, 2 * n), rng)
                continue
            model = Model(kind)
            tr = trackers[model]
            upd = None
            while upd is None:
                upd = random_update(tr.graph, rng, clock + 1)
            clock += 1
            tr.process_update(upd)
            check_graph(tr.graph)
            tr.validate()
            if rep.operations % reset_every == 0:
                trackers[model] = _fresh_tracker(model, rng.randint(2, 2 * n), sets, rng)  # IC needs two nodes for any update
        except Exception as exc:  # every failure counts as a violation
            rep.record(kind, exc)
            if kind == "index":
                index = _Index(n, rng)
            else:
                trackers[Model(kind)] = _fresh_tracker(Model(kind), n, sets, rng)
    rep.seconds = time.perf_counter() - t0
    return rep
