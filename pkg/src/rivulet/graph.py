"""Mutable weighted digraph driven by a stream of weight updates.

Nodes are dense integers ``0..n-1``.  Only in-adjacency is stored because
every consumer (RR-set sampling and maintenance) walks edges backwards.
Under the LT model each node also carries a self-weight and the total
weight ``W_v = w_v + sum_u w_uv``; under IC the edge weight is the
propagation probability and must stay in ``[0, 1]``.
"""
from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from typing import Iterable

from .errors import (
    NegativeResultingWeight,
    ProbabilityOverflow,
    SelfWeightInIC,
    UnknownNode,
)

# Sentinel "previous node" meaning a node picked no in-edge (LT) or is the
# start of a BFS (IC).
SELF = -1

# Absolute slack when comparing accumulated float weights.
WEIGHT_TOL = 1e-12

RECOMPUTE_EVERY = 1 << 20


class Model(str, enum.Enum):
    LT = "lt"
    IC = "ic"


@dataclass(frozen=True, slots=True)
class WeightUpdate:
    """One stream element ``(u, v, +/-, delta, t)``; ``u == v`` targets a self-weight."""

    t: int
    u: int
    v: int
    sign: int  # +1 or -1
    delta: float

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta!r}")

    @property
    def sign_char(self) -> str:
        return "+" if self.sign > 0 else "-"


@dataclass(slots=True)
class UpdateDelta:
    """What RR maintenance needs to know about an applied update.

    ``W_before``/``W_after`` are total weights of ``v`` and are ``None``
    under IC.  For a self-weight update ``w_*`` refer to the self-weight.
    """

    u: int
    v: int
    sign: int
    delta: float
    w_before: float
    w_after: float
    W_before: float | None = None
    W_after: float | None = None

    @property
    def is_self(self) -> bool:
        return self.u == self.v


class DynamicGraph:
    def __init__(self, n: int, model: Model | str = Model.LT):
        if n < 0:
            raise ValueError("n must be non-negative")
        self.n = n
        self.model = Model(model)
        self.in_adj: list[dict[int, float]] = [{} for _ in range(n)]
        self.self_weight = [0.0] * n
        self.total_weight = [0.0] * n
        self.updates_applied = 0

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, float]],
        model: Model | str = Model.LT,
        self_weights: dict[int, float] | None = None,
    ) -> "DynamicGraph":
        """Build a graph by inserting every edge as a weight increase."""
        g = cls(n, model)
        for u, v, w in edges:
            if w > 0:
                g.add_weight(u, v, w)
        for v, w in (self_weights or {}).items():
            if w > 0:
                g.add_weight(v, v, w)
        return g

    def add_weight(self, u: int, v: int, w: float) -> UpdateDelta:
        return self.apply_update(WeightUpdate(0, u, v, 1, w))

    # ---- queries ---------------------------------------------------------

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise UnknownNode(v)

    def weight(self, u: int, v: int) -> float:
        self._check(u)
        self._check(v)
        if u == v:
            return self.self_weight[v]
        return self.in_adj[v].get(u, 0.0)

    def in_neighbors(self, v: int) -> list[tuple[int, float]]:
        self._check(v)
        return list(self.in_adj[v].items())

    def edges(self) -> Iterable[tuple[int, int, float]]:
        for v, adj in enumerate(self.in_adj):
            for u, w in adj.items():
                yield u, v, w

    @property
    def m(self) -> int:
        return sum(len(adj) for adj in self.in_adj)

    def influence_probability(self, u: int, v: int) -> float:
        """``w_uv / W_v`` under LT, ``w_uv`` under IC."""
        w = self.weight(u, v)
        if self.model is Model.IC:
            return w
        W = self.total_weight[v]
        return w / W if W > 0 else 0.0

    # ---- mutation --------------------------------------------------------

    def apply_update(self, upd: WeightUpdate) -> UpdateDelta:
        u, v, d = upd.u, upd.v, upd.delta
        self._check(u)
        self._check(v)
        ic = self.model is Model.IC
        if u == v:
            if ic:
                raise SelfWeightInIC(f"self-weight update on node {v} under IC")
            w_before = self.self_weight[v]
        else:
            w_before = self.in_adj[v].get(u, 0.0)

        if upd.sign > 0:
            w_after = w_before + d
            if ic and w_after > 1.0:
                if w_after > 1.0 + WEIGHT_TOL:
                    raise ProbabilityOverflow(
                        f"w({u},{v}) would become {w_after!r} > 1"
                    )
                w_after = 1.0
        else:
            w_after = w_before - d
            if w_before <= 0.0:
                raise NegativeResultingWeight(f"w({u},{v}) is already 0")
            if w_after < 0.0:
                if w_after < -WEIGHT_TOL * max(1.0, d):
                    raise NegativeResultingWeight(
                        f"w({u},{v}) = {w_before!r} cannot drop by {d!r}"
                    )
                w_after = 0.0
            elif w_after <= WEIGHT_TOL * max(1.0, d):
                w_after = 0.0

        if u == v:
            self.self_weight[v] = w_after
        elif w_after > 0.0:
            self.in_adj[v][u] = w_after
        else:
            self.in_adj[v].pop(u, None)

        W_before = W_after = None
        if not ic:
            W_before = self.total_weight[v]
            W_after = W_before + (w_after - w_before)
            if W_after < WEIGHT_TOL:
                W_after = self._recompute_total(v)
            self.total_weight[v] = W_after

        self.updates_applied += 1
        if self.updates_applied % RECOMPUTE_EVERY == 0 and not ic:
            self.recompute_totals()
            W_after = self.total_weight[v]
        return UpdateDelta(u, v, upd.sign, d, w_before, w_after, W_before, W_after)

    def _recompute_total(self, v: int) -> float:
        return self.self_weight[v] + math.fsum(self.in_adj[v].values())

    def recompute_totals(self) -> None:
        """Rebuild every ``W_v`` from scratch to shed accumulated float drift."""
        self.total_weight = [self._recompute_total(v) for v in range(self.n)]

    # ---- sampling --------------------------------------------------------

    def sample_previous_node_lt(self, v: int, rng: random.Random) -> int:
        """Draw v's live in-edge source under LT, or ``SELF`` for none."""
        return sample_prev(
            self.in_adj[v], self.total_weight[v], self.self_weight[v], rng.random()
        )

    def copy(self) -> "DynamicGraph":
        g = DynamicGraph(self.n, self.model)
        g.in_adj = [dict(adj) for adj in self.in_adj]
        g.self_weight = list(self.self_weight)
        g.total_weight = list(self.total_weight)
        return g

    def same_as(self, other: "DynamicGraph", rel_tol: float = 1e-9) -> bool:
        """Field-by-field equality within a relative tolerance."""
        if self.n != other.n or self.model is not other.model:
            return False
        close = lambda a, b: math.isclose(a, b, rel_tol=rel_tol, abs_tol=1e-12)  # noqa: E731
        for v in range(self.n):
            a, b = self.in_adj[v], other.in_adj[v]
            if a.keys() != b.keys() or not all(close(a[u], b[u]) for u in a):
                return False
            if not close(self.self_weight[v], other.self_weight[v]):
                return False
            if not close(self.total_weight[v], other.total_weight[v]):
                return False
        return True

    def __repr__(self) -> str:
        return f"DynamicGraph(n={self.n}, m={self.m}, model={self.model.value})"


def sample_prev(adj: dict[int, float], W: float, w_self: float, r: float) -> int:
    """Map a uniform ``r`` in [0, 1) to an in-neighbour of ``adj`` or ``SELF``.

    Neighbour ``u`` is chosen with probability ``adj[u] / W`` and ``SELF``
    with probability ``w_self / W``.
    """
    if W <= 0.0:
        return SELF
    r *= W
    for u, w in adj.items():
        r -= w
        if r < 0.0:
            return u
    if w_self <= 0.0 and adj:
        # rounding overshoot with no self share to absorb it
        return next(reversed(adj))
    return SELF
