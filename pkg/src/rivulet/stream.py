"""Text formats for graphs, update streams and id dictionaries, plus the
workload generator that splits a static graph into a base graph and a
stream of updates whose replay ends at that graph.

Formats (tab separated, ``#`` starts a comment line):

* graph:  ``u  v  w``; ``u == v`` sets an LT self-weight.  An optional
  ``# n  N`` header fixes the node count.
* stream: ``t  u  v  +|-  delta`` with non-decreasing ``t``.
* dictionary: ``id  external_name``.
"""
from __future__ import annotations

import math
import os
import random
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Sequence

from .errors import FractionMismatch, ParseError, TimestampRegression
from .graph import DynamicGraph, Model, WeightUpdate

@contextmanager
def _lines(src):
    if isinstance(src, (str, os.PathLike)):
        with open(src, encoding="utf-8") as fh:
            yield fh, os.fspath(src)
    else:
        yield src, None


def _node(tok: str, lineno: int, path) -> int:
    try:
        u = int(tok)
    except ValueError:
        raise ParseError(lineno, f"node id {tok!r} is not an integer", path) from None
    if u < 0:
        raise ParseError(lineno, f"node id {u} is negative", path)
    return u


def _positive(tok: str, lineno: int, path, what: str, allow_zero: bool = False) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise ParseError(lineno, f"{what} {tok!r} is not a number", path) from None
    if not math.isfinite(x) or x < 0 or (x == 0 and not allow_zero):
        raise ParseError(lineno, f"{what} must be {'non-negative' if allow_zero else 'positive'}, got {tok}", path)
    return x


# ---- streams -----------------------------------------------------------------


def parse_stream(src) -> Iterator[WeightUpdate]:
    """Yield updates one line at a time."""
    with _lines(src) as (fh, path):
        last_t = None
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise ParseError(lineno, f"expected 5 tab-separated fields, got {len(parts)}", path)
            try:
                t = int(parts[0])
            except ValueError:
                raise ParseError(lineno, f"timestamp {parts[0]!r} is not an integer", path) from None
            u = _node(parts[1], lineno, path)
            v = _node(parts[2], lineno, path)
            if parts[3] not in ("+", "-"):
                raise ParseError(lineno, f"sign must be + or -, got {parts[3]!r}", path)
            delta = _positive(parts[4], lineno, path, "delta")
            if last_t is not None and t < last_t:
                raise TimestampRegression(lineno, f"timestamp {t} after {last_t}", path)
            last_t = t
            yield WeightUpdate(t, u, v, 1 if parts[3] == "+" else -1, delta)


def format_update(upd: WeightUpdate) -> str:
    return f"{upd.t}\t{upd.u}\t{upd.v}\t{upd.sign_char}\t{upd.delta!r}\n"


def write_stream(fh: IO[str], updates: Iterable[WeightUpdate]) -> int:
    k = 0
    for upd in updates:
        fh.write(format_update(upd))
        k += 1
    return k


# ---- graphs ------------------------------------------------------------------


def parse_edges(src) -> tuple[int | None, list[tuple[int, int, float]]]:
    """Raw ``(u, v, w)`` triples and the declared node count, if any."""
    n = None
    edges = []
    seen = set()
    with _lines(src) as (fh, path):
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "n":
                    n = _node(parts[1], lineno, path)
                continue
            parts = line.split("\t")
            if len(parts) == 2:
                parts.append("1")
            if len(parts) != 3:
                raise ParseError(lineno, f"expected 3 tab-separated fields, got {len(parts)}", path)
            u = _node(parts[0], lineno, path)
            v = _node(parts[1], lineno, path)
            w = _positive(parts[2], lineno, path, "weight", allow_zero=True)
            if (u, v) in seen:
                raise ParseError(lineno, f"duplicate edge ({u},{v})", path)
            seen.add((u, v))
            edges.append((u, v, w))
    if n is not None and edges:
        top = max(max(u, v) for u, v, _ in edges)
        if top >= n:
            raise ParseError(0, f"node {top} exceeds declared n={n}", None)
    return n, edges


def build_graph(n: int | None, edges: Sequence[tuple[int, int, float]], model: Model | str) -> DynamicGraph:
    if n is None:
        n = max((max(u, v) for u, v, _ in edges), default=-1) + 1
    selfw = {u: w for u, v, w in edges if u == v}
    return DynamicGraph.from_edges(n, [e for e in edges if e[0] != e[1]], model, selfw)


def parse_graph(src, model: Model | str = Model.LT) -> DynamicGraph:
    n, edges = parse_edges(src)
    return build_graph(n, edges, model)


def write_graph(fh: IO[str], g: DynamicGraph) -> None:
    fh.write(f"# n\t{g.n}\n")
    for v in range(g.n):
        for u, w in sorted(g.in_adj[v].items()):
            fh.write(f"{u}\t{v}\t{w!r}\n")
        if g.self_weight[v] > 0:
            fh.write(f"{v}\t{v}\t{g.self_weight[v]!r}\n")


# ---- dictionaries --------------------------------------------------------------


def read_dictionary(src) -> dict[int, str]:
    names: dict[int, str] = {}
    with _lines(src) as (fh, path):
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t", 1)
            if len(parts) != 2:
                raise ParseError(lineno, "expected id<TAB>name", path)
            names[_node(parts[0], lineno, path)] = parts[1]
    return names


def write_dictionary(fh: IO[str], names: dict[int, str]) -> None:
    for i in sorted(names):
        fh.write(f"{i}\t{names[i]}\n")


def densify(pairs: Iterable[tuple[str, str, float]]) -> tuple[list[tuple[int, int, float]], dict[int, str]]:
    """Map external node names to dense ids in order of first appearance."""
    ids: dict[str, int] = {}
    edges = []
    for a, b, w in pairs:
        u = ids.setdefault(a, len(ids))
        v = ids.setdefault(b, len(ids))
        edges.append((u, v, w))
    return edges, {i: name for name, i in ids.items()}


# ---- workload generation -----------------------------------------------------


@dataclass(frozen=True)
class WorkloadSpec:
    """Edge partition: base-only, churn (decrease then re-increase), arrival."""

    model: Model = Model.LT
    seed: int = 0
    base: float = 0.85
    churn: float = 0.05
    arrival: float = 0.10
    instances: int = 1

    def validate(self) -> None:
        fr = (self.base, self.churn, self.arrival)
        if any(not 0 <= f <= 1 for f in fr) or not math.isclose(sum(fr), 1.0, abs_tol=1e-9):
            raise FractionMismatch(
                f"fractions base={self.base} churn={self.churn} arrival={self.arrival} must lie in [0,1] and sum to 1"
            )
        if self.instances < 1:
            raise FractionMismatch("instances must be >= 1")


@dataclass
class Workload:
    base: DynamicGraph
    stream: list[WeightUpdate]
    final: DynamicGraph
    partition: dict[str, list[tuple[int, int]]] = field(default_factory=dict)


def cascade_weights(n: int, edges: Sequence[tuple[int, int, float]]) -> list[tuple[int, int, float]]:
    """IC weights ``1 / indeg(v)`` over the whole edge set; self-loops dropped."""
    indeg = [0] * n
    for u, v, _ in edges:
        if u != v:
            indeg[v] += 1
    return [(u, v, 1.0 / indeg[v]) for u, v, _ in edges if u != v]


def generate_workload(n: int | None, edges: Sequence[tuple[int, int, float]], spec: WorkloadSpec,
                      rng: random.Random | None = None) -> Workload:
    """Split a static graph into a base graph and an update stream.

    Edges are partitioned at random.  Arrival edges are absent from the base
    graph and arrive with one increase; churn edges start at full weight,
    drop by ``d * w`` and later regain it, ``d ~ U(0, 1]``.  LT keeps the
    input weights and self-weights; IC uses ``1 / indeg(v)`` on the full
    graph.  Updates are shuffled, each churn decrease is kept ahead of its
    increase, and timestamps run ``1..len(stream)``.
    """
    spec.validate()
    model = Model(spec.model)
    rng = rng if rng is not None else random.Random(spec.seed)
    if n is None:
        n = max((max(u, v) for u, v, _ in edges), default=-1) + 1
    if model is Model.IC:
        selfw: dict[int, float] = {}
        real = cascade_weights(n, edges)
    else:
        selfw = {u: w for u, v, w in edges if u == v and w > 0}
        real = [(u, v, w) for u, v, w in edges if u != v and w > 0]
    m = len(real)
    order = list(range(m))
    rng.shuffle(order)
    n_arr = round(spec.arrival * m)
    n_churn = round(spec.churn * m)
    if n_arr + n_churn > m:
        n_churn = m - n_arr
    arrival = sorted(order[:n_arr])
    churn = sorted(order[n_arr : n_arr + n_churn])
    arrival_set = set(arrival)

    base_edges = [real[i] for i in range(m) if i not in arrival_set]
    base = DynamicGraph.from_edges(n, base_edges, model, selfw)
    final = DynamicGraph.from_edges(n, real, model, selfw)

    # (edge index, sign, delta); timestamps assigned after shuffling
    ops: list[tuple[int, int, float]] = []
    for i in arrival:
        ops.append((i, 1, real[i][2]))
    for i in churn:
        d = (1.0 - rng.random()) * real[i][2]
        ops.append((i, -1, d))
        ops.append((i, 1, d))
    rng.shuffle(ops)
    first: dict[int, int] = {}
    for pos, (i, sign, _) in enumerate(ops):
        if i in arrival_set:
            continue
        if i not in first:
            first[i] = pos
        elif sign < 0:
            # the increase came first: swap the pair
            a = first[i]
            ops[a], ops[pos] = ops[pos], ops[a]
    stream = [
        WeightUpdate(t, real[i][0], real[i][1], sign, delta)
        for t, (i, sign, delta) in enumerate(ops, 1)
    ]
    churn_set = set(churn)
    base_only = [i for i in range(m) if i not in arrival_set and i not in churn_set]
    partition = {
        "base": [real[i][:2] for i in base_only],
        "churn": [real[i][:2] for i in churn],
        "arrival": [real[i][:2] for i in arrival],
    }
    return Workload(base, stream, final, partition)


def replay(g: DynamicGraph, stream: Iterable[WeightUpdate]) -> DynamicGraph:
    for upd in stream:
        g.apply_update(upd)
    return g
