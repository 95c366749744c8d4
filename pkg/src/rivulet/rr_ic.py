"""IC-model RR sets: reverse BFS components with their live edges.

A set stores, for every member ``x``, the sources of the live edges into
``x`` (``live[x]``) and the node whose processing first discovered ``x``
(``parent[x]``; ``SELF`` for the start).  A live edge ``(y, x)`` is a BFS
edge exactly when ``parent[y] == x``, otherwise it is a cross edge, so
labels never need separate storage.  Edge probabilities stay in the graph.

Because IC edges are independent, an update to ``(u, v)`` only re-flips that
one edge: an increase makes a dead ``(u, v)`` live with probability
``delta / (1 - w_before)``, a decrease kills a live one with probability
``delta / w_before``.  Losing a BFS edge triggers a re-traversal from the
start that keeps exactly the still-reachable part.
"""
from __future__ import annotations

import random
from collections import deque
from typing import Iterator

from .graph import SELF, DynamicGraph, UpdateDelta
from .rr_lt import MaintenanceCost
from .rrindex import RRCollection


class RRSetIC:
    __slots__ = ("start", "live", "parent")

    def __init__(self, start: int, live: dict[int, list[int]], parent: dict[int, int]):
        self.start = start
        self.live = live
        self.parent = parent

    def nodes(self):
        return self.live.keys()

    def __iter__(self) -> Iterator[int]:
        return iter(self.live)

    def __len__(self) -> int:
        return len(self.live)

    def __contains__(self, x: int) -> bool:
        return x in self.live

    def live_edges(self) -> list[tuple[int, int, str]]:
        """``(source, target, label)`` for every live edge, label BFS or CROSS."""
        par = self.parent
        return [
            (y, x, "BFS" if par.get(y) == x else "CROSS")
            for x, srcs in self.live.items()
            for y in srcs
        ]

    def __repr__(self) -> str:
        return f"RRSetIC(start={self.start}, live={self.live})"


def _expand(live, parent, queue: deque, in_adj, rand, added: list[int] | None) -> None:
    while queue:
        x = queue.popleft()
        srcs = live[x]
        for y, w in in_adj[x].items():
            if rand() < w:
                srcs.append(y)
                if y not in live:
                    live[y] = []
                    parent[y] = x
                    queue.append(y)
                    if added is not None:
                        added.append(y)


def generate_ic(g: DynamicGraph, rng: random.Random, start: int | None = None) -> RRSetIC:
    if start is None:
        start = int(rng.random() * g.n)
    live: dict[int, list[int]] = {start: []}
    parent = {start: SELF}
    _expand(live, parent, deque((start,)), g.in_adj, rng.random, None)
    return RRSetIC(start, live, parent)


def _retraverse(rr: RRSetIC) -> list[int]:
    """Keep only members reachable from the start; relabel; return dropped nodes."""
    old = rr.live
    live = {rr.start: old[rr.start]}
    parent = {rr.start: SELF}
    queue = deque((rr.start,))
    while queue:
        x = queue.popleft()
        for y in live[x]:
            if y not in live:
                live[y] = old[y]
                parent[y] = x
                queue.append(y)
    dropped = [x for x in old if x not in live]
    rr.live = live
    rr.parent = parent
    return dropped


def handle_increase_ic(
    coll: RRCollection, g: DynamicGraph, d: UpdateDelta, rng: random.Random
) -> MaintenanceCost:
    u, v = d.u, d.v
    ids = coll.containing(v)
    if not ids:
        return MaintenanceCost(0, 0, 0)
    dead = 1.0 - d.w_before
    p = d.delta / dead if dead > 0 else 1.0
    rand = rng.random
    in_adj = g.in_adj
    sets = coll.sets
    candidates = updated = 0
    for sid in ids:
        rr = sets[sid]
        live = rr.live
        srcs = live[v]
        if u in srcs:
            continue
        candidates += 1
        if rand() >= p:
            continue
        updated += 1
        srcs.append(u)
        if u in live:
            continue
        live[u] = []
        rr.parent[u] = v
        added = [u]
        _expand(live, rr.parent, deque((u,)), in_adj, rand, added)
        coll.diff_membership(sid, (), added)
    return MaintenanceCost(len(ids), candidates, updated)


def handle_decrease_ic(
    coll: RRCollection, g: DynamicGraph, d: UpdateDelta, rng: random.Random
) -> MaintenanceCost:
    u, v = d.u, d.v
    ids = coll.containing(v)
    if not ids:
        return MaintenanceCost(0, 0, 0)
    p = d.delta / d.w_before
    rand = rng.random
    sets = coll.sets
    candidates = updated = rebuilt = 0
    for sid in ids:
        rr = sets[sid]
        srcs = rr.live[v]
        if u not in srcs:
            continue
        candidates += 1
        if rand() >= p:
            continue
        updated += 1
        srcs.remove(u)
        if rr.parent.get(u) != v:
            continue  # cross edge: connectivity unchanged
        rebuilt += 1
        dropped = _retraverse(rr)
        if dropped:
            coll.diff_membership(sid, dropped, ())
    return MaintenanceCost(len(ids), candidates, updated, rebuilt)


def maintain_ic(coll: RRCollection, g: DynamicGraph, d: UpdateDelta, rng: random.Random) -> MaintenanceCost:
    if d.sign > 0:
        return handle_increase_ic(coll, g, d, rng)
    return handle_decrease_ic(coll, g, d, rng)


def check_ic_set(rr: RRSetIC, g: DynamicGraph) -> None:
    """Raise AssertionError unless members, live edges and labels are consistent."""
    live, parent = rr.live, rr.parent
    if rr.start not in live or parent.get(rr.start) != SELF:
        raise AssertionError("start missing or mislabelled")
    if live.keys() != parent.keys():
        raise AssertionError("parent map and member map disagree")
    for x, srcs in live.items():
        if len(set(srcs)) != len(srcs):
            raise AssertionError(f"duplicate live edge into {x}")
        for y in srcs:
            if y not in live:
                raise AssertionError(f"live edge ({y},{x}) leaves the set")
            if y not in g.in_adj[x]:
                raise AssertionError(f"live edge ({y},{x}) missing from graph")
    for y, x in parent.items():
        if x != SELF and y not in live[x]:
            raise AssertionError(f"BFS parent edge ({y},{x}) not live")
    # reachability over live edges must give back exactly the members
    reach = {rr.start}
    queue = deque((rr.start,))
    while queue:
        x = queue.popleft()
        for y in live[x]:
            if y not in reach:
                reach.add(y)
                queue.append(y)
    if reach != live.keys():
        raise AssertionError(f"unreachable members {set(live) - reach}")
    # BFS edges must form a spanning tree rooted at the start
    for x in live:
        hops = 0
        y = x
        while y != rr.start:
            y = parent[y]
            hops += 1
            if hops > len(live):
                raise AssertionError(f"parent chain from {x} cycles")
