"""LT-model RR sets: reverse random walks kept valid under weight updates.

Under the live-edge view of LT every node keeps at most one in-edge, so a
reverse walk from a uniform start traces a simple path ``v1 <- v2 <- ...``
that ends when the last node picks itself (``SELF``) or a node already on
the path.  That final choice is stored in ``last_prev`` so the predecessor
of every path node is known: ``path[i + 1]`` or ``last_prev`` for the tail.

Maintenance follows a reservoir-style argument.  An increase of ``w_uv``
by ``delta`` reroutes each set through ``v`` to ``u`` with probability
``delta / W_v`` (post-update); a decrease reroutes only the sets where
``v`` points at ``u``, with probability ``delta / w_uv`` (pre-update), and
redraws ``v``'s predecessor from the current graph.  Either way the part of
the path beyond ``v`` is discarded and the walk resumes with fresh draws.
"""
from __future__ import annotations

import random
from typing import Iterator, NamedTuple

from .graph import SELF, DynamicGraph, UpdateDelta, sample_prev
from .rrindex import RRCollection


class RRSetLT:
    __slots__ = ("path", "last_prev")

    def __init__(self, path: list[int], last_prev: int):
        self.path = path
        self.last_prev = last_prev

    def nodes(self) -> list[int]:
        return self.path

    def __iter__(self) -> Iterator[int]:
        return iter(self.path)

    def __len__(self) -> int:
        return len(self.path)

    def __contains__(self, x: int) -> bool:
        return x in self.path

    def prev_of(self, x: int) -> int:
        """Predecessor chosen by path node ``x``."""
        i = self.path.index(x)
        return self.path[i + 1] if i + 1 < len(self.path) else self.last_prev

    def __repr__(self) -> str:
        return f"RRSetLT(path={self.path}, last_prev={self.last_prev})"


class MaintenanceCost(NamedTuple):
    retrieved: int  # sets fetched through the inverted index
    candidates: int  # sets eligible for rerouting
    updated: int  # sets actually modified
    retraversals: int = 0  # IC only: BFS rebuilds after losing a tree edge


def _walk(path: list[int], cur: int, in_adj, total, selfw, rand) -> int:
    """Extend ``path`` from ``cur`` until SELF or a cycle; return the stop choice."""
    while cur != SELF and cur not in path:
        path.append(cur)
        cur = sample_prev(in_adj[cur], total[cur], selfw[cur], rand())
    return cur


def generate_lt(g: DynamicGraph, rng: random.Random, start: int | None = None) -> RRSetLT:
    """Poll a uniform start (unless given) and walk backwards."""
    if start is None:
        start = int(rng.random() * g.n)
    path: list[int] = []
    last = _walk(path, start, g.in_adj, g.total_weight, g.self_weight, rng.random)
    return RRSetLT(path, last)


def _reroute(rr: RRSetLT, i: int, new_prev: int, g: DynamicGraph, rng) -> tuple[list[int], list[int]]:
    """Point ``path[i]`` at ``new_prev`` and regrow the walk; return the diff."""
    path = rr.path
    removed = path[i + 1 :]
    del path[i + 1 :]
    rr.last_prev = _walk(path, new_prev, g.in_adj, g.total_weight, g.self_weight, rng.random)
    added = path[i + 1 :]
    if removed and added:
        # nodes that fell off and were walked back onto the path
        keep = set(removed).intersection(added)
        if keep:
            removed = [x for x in removed if x not in keep]
            added = [x for x in added if x not in keep]
    return removed, added


def handle_increase_lt(
    coll: RRCollection, g: DynamicGraph, d: UpdateDelta, rng: random.Random
) -> MaintenanceCost:
    u, v = d.u, d.v
    ids = coll.containing(v)
    if not ids:
        return MaintenanceCost(0, 0, 0)
    p = d.delta / d.W_after
    target = SELF if u == v else u
    rand = rng.random
    sets = coll.sets
    updated = 0
    for sid in ids:
        if rand() >= p:
            continue
        rr = sets[sid]
        removed, added = _reroute(rr, rr.path.index(v), target, g, rng)
        if removed or added:
            coll.diff_membership(sid, removed, added)
        updated += 1
    return MaintenanceCost(len(ids), len(ids), updated)


def handle_decrease_lt(
    coll: RRCollection, g: DynamicGraph, d: UpdateDelta, rng: random.Random
) -> MaintenanceCost:
    u, v = d.u, d.v
    ids = coll.containing(v)
    if not ids:
        return MaintenanceCost(0, 0, 0)
    target = SELF if u == v else u
    p = d.delta / d.w_before
    in_adj, total, selfw = g.in_adj, g.total_weight, g.self_weight
    rand = rng.random
    sets = coll.sets
    candidates = updated = 0
    for sid in ids:
        rr = sets[sid]
        path = rr.path
        i = path.index(v)
        prev = path[i + 1] if i + 1 < len(path) else rr.last_prev
        if prev != target:
            continue
        candidates += 1
        if rand() >= p:
            continue
        new_prev = sample_prev(in_adj[v], total[v], selfw[v], rand())
        removed, added = _reroute(rr, i, new_prev, g, rng)
        if removed or added:
            coll.diff_membership(sid, removed, added)
        updated += 1
    return MaintenanceCost(len(ids), candidates, updated)


def maintain_lt(coll: RRCollection, g: DynamicGraph, d: UpdateDelta, rng: random.Random) -> MaintenanceCost:
    if d.sign > 0:
        return handle_increase_lt(coll, g, d, rng)
    return handle_decrease_lt(coll, g, d, rng)


def check_lt_set(rr: RRSetLT, g: DynamicGraph) -> None:
    """Raise AssertionError unless ``rr`` is a simple path of existing edges."""
    path = rr.path
    if not path:
        raise AssertionError("empty LT path")
    if len(set(path)) != len(path):
        raise AssertionError(f"path not simple: {path}")
    for a, b in zip(path, path[1:]):
        if b not in g.in_adj[a]:
            raise AssertionError(f"path uses missing edge ({b},{a})")
    last = path[-1]
    if rr.last_prev == SELF:
        if g.self_weight[last] <= 0 and g.total_weight[last] > 0:
            raise AssertionError(f"tail {last} picked SELF with zero self-weight")
    else:
        if rr.last_prev not in path:
            raise AssertionError("last_prev neither SELF nor on path")
        if rr.last_prev not in g.in_adj[last]:
            raise AssertionError(f"tail uses missing edge ({rr.last_prev},{last})")
