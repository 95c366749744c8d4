"""Ground-truth influence: exact enumeration, Monte-Carlo, static polling.

Exact influence uses the live-edge view: under LT each node independently
picks one in-neighbour (or none), under IC each edge is independently live.
Influence of ``u`` is the expected number of nodes reachable from ``u``
through live edges.
"""
from __future__ import annotations

import enum
import graphlib
import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import ParseError, TooLargeToEnumerate
from .graph import SELF, DynamicGraph, Model
from .rrindex import RRCollection
from .tracker import fill

ENUMERATION_LIMIT = 10**7


class Method(str, enum.Enum):
    EXACT = "EXACT"
    MC = "MC"
    POLL = "POLL"


@dataclass
class InfluenceTable:
    values: list[float]
    stderr: list[float]
    method: Method = Method.EXACT
    extra: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, u: int) -> float:
        return self.values[u]

    @property
    def imax(self) -> float:
        return max(self.values)

    def kth(self, k: int) -> float:
        """k-th largest influence."""
        return sorted(self.values, reverse=True)[k - 1]

    def at_least(self, T: float) -> set[int]:
        return {u for u, val in enumerate(self.values) if val >= T}

    def top(self, k: int) -> list[int]:
        """Top-k ids, ties by ascending id."""
        return sorted(range(len(self.values)), key=lambda u: (-self.values[u], u))[:k]

    def write_tsv(self, fh: TextIO) -> None:
        fh.write("node\tinfluence\tstderr\tmethod\n")
        for u, (val, se) in enumerate(zip(self.values, self.stderr)):
            fh.write(f"{u}\t{val!r}\t{se!r}\t{self.method.value}\n")

    def to_tsv(self) -> str:
        import io

        buf = io.StringIO()
        self.write_tsv(buf)
        return buf.getvalue()

    @classmethod
    def read_tsv(cls, lines: Iterable[str], path: str | None = None) -> "InfluenceTable":
        rows: dict[int, tuple[float, float]] = {}
        method = None
        for lineno, line in enumerate(lines, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#") or line.startswith("node\t"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ParseError(lineno, f"expected 4 fields, got {len(parts)}", path)
            try:
                u, val, se = int(parts[0]), float(parts[1]), float(parts[2])
                m = Method(parts[3])
            except ValueError as exc:
                raise ParseError(lineno, str(exc), path) from None
            if method is None:
                method = m
            rows[u] = (val, se)
        n = max(rows) + 1 if rows else 0
        if sorted(rows) != list(range(n)):
            raise ParseError(0, "node ids are not dense 0..n-1", path)
        return cls([rows[u][0] for u in range(n)], [rows[u][1] for u in range(n)],
                   method or Method.EXACT)


# ---- exact -------------------------------------------------------------------


def configuration_count(g: DynamicGraph) -> int:
    if g.model is Model.LT:
        return math.prod(len(adj) + 1 for adj in g.in_adj)
    return 2 ** g.m


def _reach_counts(n: int, out: list[list[int]]) -> list[int]:
    counts = []
    for u in range(n):
        seen = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for y in out[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        counts.append(len(seen))
    return counts


def exact_influence(g: DynamicGraph, limit: int = ENUMERATION_LIMIT) -> InfluenceTable:
    """Influence of every node by summing over all live-edge configurations."""
    n = g.n
    total = configuration_count(g)
    if total > limit:
        raise TooLargeToEnumerate(f"{total} configurations exceed the limit of {limit}")
    acc = [0.0] * n
    if g.model is Model.LT:
        # per node: list of (chosen source or SELF, probability)
        options = []
        for v in range(n):
            W = g.total_weight[v]
            opts = [(u, w / W) for u, w in g.in_adj[v].items()] if W > 0 else []
            p_none = 1.0 - math.fsum(p for _, p in opts)
            opts.append((SELF, max(p_none, 0.0)))
            options.append(opts)
        for combo in itertools.product(*options):
            p = math.prod(q for _, q in combo)
            if p == 0.0:
                continue
            out: list[list[int]] = [[] for _ in range(n)]
            for v, (u, _) in enumerate(combo):
                if u != SELF:
                    out[u].append(v)
            for u, c in enumerate(_reach_counts(n, out)):
                acc[u] += p * c
    else:
        edges = list(g.edges())
        for mask in itertools.product((False, True), repeat=len(edges)):
            p = 1.0
            out = [[] for _ in range(n)]
            for live, (u, v, w) in zip(mask, edges):
                if live:
                    p *= w
                    out[u].append(v)
                else:
                    p *= 1.0 - w
            if p == 0.0:
                continue
            for u, c in enumerate(_reach_counts(n, out)):
                acc[u] += p * c
    return InfluenceTable(acc, [0.0] * n, Method.EXACT)


# ---- Monte-Carlo ---------------------------------------------------------------


def _out_adjacency(g: DynamicGraph) -> list[list[tuple[int, float]]]:
    """Forward edges with their influence probabilities."""
    out: list[list[tuple[int, float]]] = [[] for _ in range(g.n)]
    lt = g.model is Model.LT
    for v, adj in enumerate(g.in_adj):
        W = g.total_weight[v] if lt else 1.0
        for u, w in adj.items():
            out[u].append((v, w / W if lt else w))
    return out


def _simulate_lt(u: int, out, rand) -> int:
    thresholds: dict[int, float] = {}
    pressure: dict[int, float] = {}
    active = {u}
    frontier = [u]
    while frontier:
        nxt = []
        for x in frontier:
            for v, p in out[x]:
                if v in active:
                    continue
                lam = thresholds.get(v)
                if lam is None:
                    lam = thresholds[v] = rand()
                s = pressure.get(v, 0.0) + p
                pressure[v] = s
                if s >= lam:
                    active.add(v)
                    nxt.append(v)
        frontier = nxt
    return len(active)


def _simulate_ic(u: int, out, rand) -> int:
    active = {u}
    frontier = [u]
    while frontier:
        nxt = []
        for x in frontier:
            for v, p in out[x]:
                if v not in active and rand() < p:
                    active.add(v)
                    nxt.append(v)
        frontier = nxt
    return len(active)


def mc_influence(g: DynamicGraph, u: int, trials: int, rng: random.Random,
                 out=None) -> tuple[float, float]:
    """Forward-simulate diffusion from ``{u}``; return mean and standard error.

    LT draws a uniform threshold per node; a node activates once the summed
    influence probabilities of its active in-neighbours reach it.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if out is None:
        out = _out_adjacency(g)
    sim = _simulate_lt if g.model is Model.LT else _simulate_ic
    rand = rng.random
    s = s2 = 0.0
    for _ in range(trials):
        c = sim(u, out, rand)
        s += c
        s2 += c * c
    mean = s / trials
    if trials == 1:
        return mean, 0.0
    var = max(s2 / trials - mean * mean, 0.0) * trials / (trials - 1)
    return mean, math.sqrt(var / trials)


def mc_influence_table(g: DynamicGraph, trials: int, rng: random.Random) -> InfluenceTable:
    out = _out_adjacency(g)
    vals, ses = [], []
    for u in range(g.n):
        m, se = mc_influence(g, u, trials, rng, out)
        vals.append(m)
        ses.append(se)
    return InfluenceTable(vals, ses, Method.MC, {"trials": trials})


def _topological_order(g: DynamicGraph) -> list[int]:
    ts = graphlib.TopologicalSorter({v: list(adj) for v, adj in enumerate(g.in_adj)})
    try:
        return list(ts.static_order())
    except graphlib.CycleError as exc:
        raise ValueError("vectorised Monte-Carlo needs an acyclic graph") from exc


def mc_influence_all(g: DynamicGraph, trials: int, seed: int | None = None,
                     batch: int | None = None) -> InfluenceTable:
    """Monte-Carlo influence of every node at once, for acyclic graphs.

    Each trial samples one live-edge graph and counts, for every node, the
    nodes it reaches.  LT live-edge graphs are forests, so counts are subtree
    sizes; IC counts use packed reachability bitsets.
    """
    order = _topological_order(g)  # sources first
    rng = np.random.default_rng(seed)
    n = g.n
    s = np.zeros(n)
    s2 = np.zeros(n)
    if g.model is Model.LT:
        batch = batch or 20000
        srcs, cums = [], []
        for v in range(n):
            W = g.total_weight[v]
            adj = g.in_adj[v]
            srcs.append(np.fromiter(adj.keys(), dtype=np.int64, count=len(adj)))
            w = np.fromiter(adj.values(), dtype=float, count=len(adj))
            cums.append(np.cumsum(w) / W if W > 0 else w)
        rev = order[::-1]
        done = 0
        while done < trials:
            b = min(batch, trials - done)
            rows = np.arange(b)
            size = np.ones((b, n))
            for v in rev:
                if not len(srcs[v]):
                    continue
                idx = np.searchsorted(cums[v], rng.random(b), side="right")
                hit = idx < len(srcs[v])
                par = srcs[v][idx[hit]]
                np.add.at(size, (rows[hit], par), size[hit, v])
            s += size.sum(axis=0)
            s2 += (size * size).sum(axis=0)
            done += b
    else:
        batch = batch or 4000
        words = (n + 63) // 64
        out_edges = _out_adjacency(g)
        rev = order[::-1]
        done = 0
        while done < trials:
            b = min(batch, trials - done)
            # reach[u] holds one row of node bits per trial
            reach = np.zeros((n, b, words), dtype=np.uint64)
            for u in range(n):
                reach[u, :, u // 64] = np.uint64(1) << np.uint64(u % 64)
            for u in rev:
                acc = reach[u]
                for v, w in out_edges[u]:
                    # all-ones mask on trials where (u, v) is live
                    mask = -(rng.random(b) < w).astype(np.uint64)
                    acc |= reach[v] & mask[:, None]
            cnt = np.bitwise_count(reach).sum(axis=2, dtype=np.int64).T.astype(float)
            s += cnt.sum(axis=0)
            s2 += (cnt * cnt).sum(axis=0)
            done += b
    mean = s / trials
    var = np.maximum(s2 / trials - mean * mean, 0.0) * trials / max(trials - 1, 1)
    se = np.sqrt(var / trials)
    return InfluenceTable(mean.tolist(), se.tolist(), Method.MC, {"trials": trials})


# ---- static polling --------------------------------------------------------------


def static_poll_collection(g: DynamicGraph, M: int, rng: random.Random) -> RRCollection:
    coll = RRCollection(g.n)
    fill(coll, g, M, rng)
    return coll


def static_poll_estimate(g: DynamicGraph, M: int, rng: random.Random) -> InfluenceTable:
    """``n F_R(u)`` from ``M`` fresh RR sets on the current graph."""
    if M < 1:
        raise ValueError("M must be >= 1")
    coll = static_poll_collection(g, M, rng)
    n = g.n
    vals, ses = [], []
    for d in coll.ranking.degree:
        p = d / M
        vals.append(n * p)
        ses.append(n * math.sqrt(p * (1 - p) / M))
    return InfluenceTable(vals, ses, Method.POLL, {"M": M})
