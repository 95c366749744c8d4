"""Synthetic graphs for tests, benchmarks and acceptance runs.

All generators return ``(n, edges)`` with ``edges`` as ``(u, v, w)`` triples
where ``u == v`` marks an LT self-weight, ready for ``build_graph`` or the
workload generator.
"""
from __future__ import annotations

import random

Edges = list[tuple[int, int, float]]


def price_dag(n: int, out_links: int, rng: random.Random, weight: float = 1.0,
              self_weight: float = 0.0, attach_bias: float = 1.0) -> tuple[int, Edges]:
    """Preferential-attachment DAG with edges ``u -> v`` for ``u < v``.

    Each new node draws up to ``out_links`` distinct earlier nodes with
    probability proportional to (their fan-out + ``attach_bias``), so early
    nodes collect heavy-tailed fan-out and influence.
    """
    edges: Edges = []
    # urn of node ids, one ticket per fan-out edge plus the bias tickets
    urn: list[int] = []
    bias = max(1, round(attach_bias))
    for v in range(n):
        if v > 0:
            picks: set[int] = set()
            want = min(out_links, v)
            while len(picks) < want:
                picks.add(rng.choice(urn))
            for u in sorted(picks):
                edges.append((u, v, weight))
                urn.append(u)
        urn.extend([v] * bias)
        if self_weight > 0:
            edges.append((v, v, self_weight))
    return n, edges


def star(n: int, weight: float = 1.0, self_weight: float = 0.0) -> tuple[int, Edges]:
    """Hub 0 pointing at leaves ``1..n-1``."""
    edges: Edges = [(0, v, weight) for v in range(1, n)]
    if self_weight > 0:
        edges += [(v, v, self_weight) for v in range(n)]
    return n, edges


def two_hub(n: int, big: int, small: int, weight: float = 1.0,
            self_weight: float = 0.0) -> tuple[int, Edges]:
    """Hub 0 reaches ``big`` leaves, hub 1 reaches ``small`` others; the rest are isolated."""
    if 2 + big + small > n:
        raise ValueError("not enough nodes for the requested fan-outs")
    edges: Edges = [(0, 2 + i, weight) for i in range(big)]
    edges += [(1, 2 + big + i, weight) for i in range(small)]
    if self_weight > 0:
        edges += [(v, v, self_weight) for v in range(n)]
    return n, edges


def random_digraph(n: int, m: int, rng: random.Random, wmax: float = 1.0) -> tuple[int, Edges]:
    """``m`` distinct directed edges between distinct nodes, weights ``U(0, wmax]``."""
    if m > n * (n - 1):
        raise ValueError("too many edges")
    seen: set[tuple[int, int]] = set()
    edges: Edges = []
    while len(edges) < m:
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v or (u, v) in seen:
            continue
        seen.add((u, v))
        edges.append((u, v, (1.0 - rng.random()) * wmax))
    return n, edges
