"""Collection of RR sets with an inverted index and an O(1) degree ranking.

``DegreeBucketList`` keeps every node with non-zero RR-degree in a doubly
linked list of buckets ordered by descending degree; each bucket holds a
doubly linked list of the nodes sharing that degree.  A ±1 degree change
moves a node to the neighbouring bucket (creating or dropping buckets as
needed) in constant time.  Degree-0 nodes live in an implicit tail bucket.
"""
from __future__ import annotations

import json
from typing import Any, Iterable, Iterator

from .errors import DuplicateSetId, EmptyCollection, UnknownSetId

_NIL = -1


class _Bucket:
    __slots__ = ("degree", "first", "size", "higher", "lower")

    def __init__(self, degree: int):
        self.degree = degree
        self.first = _NIL
        self.size = 0
        self.higher: _Bucket | None = None
        self.lower: _Bucket | None = None


class DegreeBucketList:
    """Nodes ``0..n-1`` sorted by degree with O(1) relocation per ±1 change.

    ``mutations`` counts structural writes (link fields, bucket creation and
    removal) so callers can check the per-relocation cost is constant.
    """

    def __init__(self, n: int):
        self.n = n
        self.degree = [0] * n
        self._prev = [_NIL] * n
        self._next = [_NIL] * n
        self._bucket: list[_Bucket | None] = [None] * n
        self.top: _Bucket | None = None
        self.bottom: _Bucket | None = None
        self.buckets = 0
        self.mutations = 0

    # ---- linked-list primitives -----------------------------------------

    def _new_bucket(self, degree: int, higher: _Bucket | None, lower: _Bucket | None) -> _Bucket:
        b = _Bucket(degree)
        b.higher = higher
        b.lower = lower
        if higher is None:
            self.top = b
        else:
            higher.lower = b
        if lower is None:
            self.bottom = b
        else:
            lower.higher = b
        self.buckets += 1
        self.mutations += 4
        return b

    def _drop_bucket(self, b: _Bucket) -> None:
        h, lo = b.higher, b.lower
        if h is None:
            self.top = lo
        else:
            h.lower = lo
        if lo is None:
            self.bottom = h
        else:
            lo.higher = h
        self.buckets -= 1
        self.mutations += 2

    def _unlink(self, u: int, b: _Bucket) -> None:
        p, nx = self._prev[u], self._next[u]
        if p == _NIL:
            b.first = nx
        else:
            self._next[p] = nx
        if nx != _NIL:
            self._prev[nx] = p
        b.size -= 1
        self.mutations += 3

    def _push(self, u: int, b: _Bucket) -> None:
        f = b.first
        self._prev[u] = _NIL
        self._next[u] = f
        if f != _NIL:
            self._prev[f] = u
        b.first = u
        b.size += 1
        self._bucket[u] = b
        self.mutations += 5

    # ---- public ----------------------------------------------------------

    def increment(self, u: int) -> None:
        d = self.degree[u]
        b = self._bucket[u]
        if b is None:
            t = self.bottom
            target = t if t is not None and t.degree == 1 else self._new_bucket(1, t, None)
        else:
            h = b.higher
            target = h if h is not None and h.degree == d + 1 else self._new_bucket(d + 1, h, b)
            self._unlink(u, b)
            if b.size == 0:
                self._drop_bucket(b)
        self._push(u, target)
        self.degree[u] = d + 1

    def decrement(self, u: int) -> None:
        d = self.degree[u]
        b = self._bucket[u]
        if b is None:
            raise ValueError(f"node {u} already has degree 0")
        if d == 1:
            target = None
        else:
            lo = b.lower
            target = lo if lo is not None and lo.degree == d - 1 else self._new_bucket(d - 1, b, lo)
        self._unlink(u, b)
        if b.size == 0:
            self._drop_bucket(b)
        if target is None:
            self._bucket[u] = None
            self._prev[u] = self._next[u] = _NIL
            self.mutations += 1
        else:
            self._push(u, target)
        self.degree[u] = d - 1

    def iter_buckets(self) -> Iterator[tuple[int, list[int]]]:
        """Yield ``(degree, nodes)`` from the highest degree down, in list order."""
        b = self.top
        nxt = self._next
        while b is not None:
            nodes = []
            u = b.first
            while u != _NIL:
                nodes.append(u)
                u = nxt[u]
            yield b.degree, nodes
            b = b.lower

    def max_degree(self) -> int:
        return self.top.degree if self.top is not None else 0

    def kth_degree(self, k: int) -> int:
        if k < 1:
            raise ValueError("k must be >= 1")
        seen = 0
        b = self.top
        while b is not None:
            seen += b.size
            if seen >= k:
                return b.degree
            b = b.lower
        return 0

    def ranked(self, k: int | None = None) -> list[int]:
        """First ``k`` nodes by (degree desc, id asc); all n when k is None."""
        k = self.n if k is None else min(k, self.n)
        out: list[int] = []
        for _, nodes in self.iter_buckets():
            if len(out) >= k:
                break
            nodes.sort()
            out.extend(nodes[: k - len(out)])
        if len(out) < k:
            deg = self.degree
            for u in range(self.n):
                if deg[u] == 0:
                    out.append(u)
                    if len(out) == k:
                        break
        return out

    def dump_jsonl(self) -> str:
        """One JSON line per bucket; node lists sorted for stable golden files."""
        return "".join(
            json.dumps({"degree": d, "nodes": sorted(nodes)}) + "\n"
            for d, nodes in self.iter_buckets()
        )


class RRCollection:
    """Insertion-ordered RR sets plus node -> set-id inverted index and ranking.

    Payloads must iterate over their member nodes.  When ``register`` gets
    a bare iterable it stores a ``set`` copy, and ``diff_membership`` keeps
    that set in sync; RR-set objects are mutated by their owners before the
    diff is pushed here.
    """

    def __init__(self, n: int):
        self.n = n
        self.sets: dict[int, Any] = {}
        self.inverted: list[set[int]] = [set() for _ in range(n)]
        self.ranking = DegreeBucketList(n)
        self._next_id = 0
        self.total_size = 0

    def __len__(self) -> int:
        return len(self.sets)

    @property
    def M(self) -> int:
        return len(self.sets)

    # ---- registration ----------------------------------------------------

    def add(self, rrset: Any) -> int:
        sid = self._next_id
        self.register(sid, rrset)
        return sid

    def register(self, set_id: int, members: Any) -> None:
        if set_id in self.sets:
            raise DuplicateSetId(set_id)
        if not hasattr(members, "nodes"):
            members = set(members)
        self.sets[set_id] = members
        if set_id >= self._next_id:
            self._next_id = set_id + 1
        inv = self.inverted
        inc = self.ranking.increment
        k = 0
        for x in members:
            inv[x].add(set_id)
            inc(x)
            k += 1
        self.total_size += k

    def unregister(self, set_id: int) -> Any:
        try:
            payload = self.sets.pop(set_id)
        except KeyError:
            raise UnknownSetId(set_id) from None
        inv = self.inverted
        dec = self.ranking.decrement
        k = 0
        for x in payload:
            inv[x].discard(set_id)
            dec(x)
            k += 1
        self.total_size -= k
        return payload

    def diff_membership(self, set_id: int, removed: Iterable[int], added: Iterable[int]) -> None:
        """Apply a membership change; ``removed`` and ``added`` must be re-iterable."""
        payload = self.sets.get(set_id)
        if payload is None:
            raise UnknownSetId(set_id)
        inv = self.inverted
        rk = self.ranking
        k = 0
        for x in removed:
            inv[x].remove(set_id)
            rk.decrement(x)
            k -= 1
        for x in added:
            inv[x].add(set_id)
            rk.increment(x)
            k += 1
        self.total_size += k
        if type(payload) is set:
            payload.difference_update(removed)
            payload.update(added)

    def last_id(self) -> int:
        if not self.sets:
            raise EmptyCollection("collection is empty")
        return next(reversed(self.sets))

    def pop_last(self) -> tuple[int, Any]:
        sid = self.last_id()
        return sid, self.unregister(sid)

    def containing(self, v: int) -> tuple[int, ...]:
        """Snapshot of ids of sets containing ``v``."""
        return tuple(self.inverted[v])

    # ---- statistics ------------------------------------------------------

    def degree(self, u: int) -> int:
        return self.ranking.degree[u]

    def _require(self) -> int:
        M = len(self.sets)
        if M == 0:
            raise EmptyCollection("collection is empty")
        return M

    def fraction(self, u: int) -> float:
        return self.ranking.degree[u] / self._require()

    def max_fraction(self) -> float:
        return self.ranking.max_degree() / self._require()

    def kth_fraction(self, k: int) -> float:
        return self.ranking.kth_degree(k) / self._require()

    def top_fraction(self, k: int) -> list[tuple[int, float]]:
        M = self._require()
        deg = self.ranking.degree
        return [(u, deg[u] / M) for u in self.ranking.ranked(k)]

    def nodes_with_degree_at_least(self, dmin: int) -> list[int]:
        """Nodes with ``D(u) >= dmin`` ranked by (degree desc, id asc)."""
        out: list[int] = []
        for d, nodes in self.ranking.iter_buckets():
            if d < dmin:
                break
            nodes.sort()
            out.extend(nodes)
        if dmin <= 0:
            deg = self.ranking.degree
            out.extend(u for u in range(self.n) if deg[u] == 0)
        return out

    # ---- validation ------------------------------------------------------

    def check(self) -> None:
        """Rebuild index and ranking from the payloads; raise on any mismatch."""
        inv = [set() for _ in range(self.n)]
        total = 0
        for sid, payload in self.sets.items():
            for x in payload:
                if sid in inv[x]:
                    raise AssertionError(f"set {sid} lists node {x} twice")
                inv[x].add(sid)
                total += 1
        if inv != self.inverted:
            bad = next(u for u in range(self.n) if inv[u] != self.inverted[u])
            raise AssertionError(
                f"inverted index mismatch at node {bad}: {self.inverted[bad]} != {inv[bad]}"
            )
        if total != self.total_size:
            raise AssertionError(f"total_size {self.total_size} != {total}")
        check_ranking(self.ranking, [len(s) for s in inv])
        if self.sets and max(self.sets) >= self._next_id:
            raise AssertionError("set id beyond allocation counter")
        ids = list(self.sets)
        if ids != sorted(ids):
            raise AssertionError("set ids out of insertion order")


def check_ranking(rk: DegreeBucketList, degrees: list[int]) -> None:
    """Compare a bucket list with degrees recomputed from scratch."""
    if rk.degree != degrees:
        raise AssertionError("ranking degree array disagrees with inverted index")
    seen: list[int] = []
    last = None
    count = 0
    b = rk.top
    prev_b = None
    while b is not None:
        if b.higher is not prev_b:
            raise AssertionError("bucket back-link broken")
        if b.size == 0 or b.first == _NIL:
            raise AssertionError(f"empty bucket of degree {b.degree}")
        if last is not None and b.degree >= last:
            raise AssertionError("buckets not strictly descending")
        last = b.degree
        u = b.first
        p = _NIL
        size = 0
        while u != _NIL:
            if rk._prev[u] != p or rk._bucket[u] is not b or degrees[u] != b.degree:
                raise AssertionError(f"cell for node {u} inconsistent")
            seen.append(u)
            size += 1
            p = u
            u = rk._next[u]
        if size != b.size:
            raise AssertionError("bucket size counter wrong")
        count += 1
        prev_b = b
        b = b.lower
    if rk.bottom is not prev_b:
        raise AssertionError("bottom pointer wrong")
    if count != rk.buckets or count != len({d for d in degrees if d > 0}):
        raise AssertionError("bucket count differs from distinct non-zero degrees")
    nonzero = [u for u in range(rk.n) if degrees[u] > 0]
    if sorted(seen) != nonzero:
        raise AssertionError("linked list does not hold exactly the non-zero nodes")
    for u in range(rk.n):
        if degrees[u] == 0 and rk._bucket[u] is not None:
            raise AssertionError(f"degree-0 node {u} still linked")
