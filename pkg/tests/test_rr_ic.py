import random
from collections import Counter

import pytest
from scipy.stats import binomtest

from rivulet.graph import SELF, DynamicGraph, WeightUpdate
from rivulet.oracle import exact_influence
from rivulet.rr_ic import RRSetIC, check_ic_set, generate_ic, maintain_ic
from rivulet.rrindex import RRCollection
from rivulet.tracker import InfluenceTracker

from conftest import mean_se, random_stream, small_graph, two_sample_chi2


def _collection(g, count, rng, start=None):
    c = RRCollection(g.n)
    for _ in range(count):
        c.add(generate_ic(g, rng, start))
    return c


def _apply(c, g, upd, rng):
    return maintain_ic(c, g, g.apply_update(upd), rng)


def _live(rr: RRSetIC):
    return frozenset((y, x) for y, x, _ in rr.live_edges())


def test_no_in_edges():
    g = DynamicGraph.from_edges(3, [(0, 1, 0.5)], "ic")
    rr = generate_ic(g, random.Random(0), start=0)
    assert set(rr) == {0} and rr.live_edges() == []


def test_chain_reach_probability():
    g = DynamicGraph.from_edges(3, [(0, 1, 0.5), (1, 2, 0.5)], "ic")
    r = random.Random(1)
    hits = sum(0 in generate_ic(g, r, start=2) for _ in range(100_000))
    assert binomtest(hits, 100_000, 0.25).pvalue > 0.001
    assert abs(hits / 100_000 - 0.25) < 0.01


def test_triangle_deterministic_labels():
    a, b, c = 0, 1, 2
    g = DynamicGraph.from_edges(3, [(a, c, 1.0), (b, c, 1.0), (a, b, 1.0)], "ic")
    r = random.Random(2)
    labels = set()
    for _ in range(50):
        rr = generate_ic(g, r, start=c)
        assert set(rr) == {a, b, c}
        edges = rr.live_edges()
        assert len(edges) == 3
        assert sum(lab == "CROSS" for *_, lab in edges) == 1
        cross = next((y, x) for y, x, lab in edges if lab == "CROSS")
        assert cross == (a, b)  # FIFO: c discovers a before b's in-edges are read
        labels.add(cross)
    assert labels == {(a, b)}


def test_increase_probability_quarter():
    g = DynamicGraph.from_edges(2, [(0, 1, 0.2)], "ic")
    r = random.Random(3)
    c = _collection(g, 40_000, r, start=1)
    dead = [sid for sid, rr in c.sets.items() if 0 not in rr.live[1]]
    _apply(c, g, WeightUpdate(1, 0, 1, 1, 0.2), r)
    flipped = sum(0 in c.sets[sid].live[1] for sid in dead)
    assert binomtest(flipped, len(dead), 0.25).pvalue > 0.001


def test_certain_increase():
    g = DynamicGraph.from_edges(3, [(2, 1, 0.5)], "ic")
    r = random.Random(4)
    c = _collection(g, 500, r, start=1)
    cost = _apply(c, g, WeightUpdate(1, 0, 1, 1, 1.0), r)
    assert cost.updated == cost.retrieved == 500
    assert all(0 in rr for rr in c.sets.values())
    for rr in c.sets.values():
        check_ic_set(rr, g)


def test_increase_marginal():
    g = DynamicGraph.from_edges(3, [(0, 2, 0.3), (1, 2, 0.4)], "ic")
    r = random.Random(5)
    c = _collection(g, 10_000, r, start=2)
    _apply(c, g, WeightUpdate(1, 0, 2, 1, 0.35), r)
    frac = sum(0 in rr.live[2] for rr in c.sets.values()) / 10_000
    assert abs(frac - 0.65) <= 0.02


def test_decrease_marginal():
    g = DynamicGraph.from_edges(3, [(0, 2, 0.9), (1, 0, 0.5)], "ic")
    r = random.Random(6)
    c = _collection(g, 10_000, r, start=2)
    _apply(c, g, WeightUpdate(1, 0, 2, -1, 0.6), r)
    frac = sum(0 in rr.live[2] for rr in c.sets.values()) / 10_000
    assert abs(frac - 0.3) <= 0.02
    for rr in c.sets.values():
        check_ic_set(rr, g)
    c.check()


def test_full_removal_is_certain():
    g = DynamicGraph.from_edges(2, [(0, 1, 0.7)], "ic")
    r = random.Random(7)
    c = _collection(g, 1000, r, start=1)
    live = sum(0 in rr for rr in c.sets.values())
    cost = _apply(c, g, WeightUpdate(1, 0, 1, -1, 0.7), r)
    assert cost.candidates == cost.updated == live
    assert not any(0 in rr for rr in c.sets.values())


def test_cross_edge_removal_keeps_members():
    a, b, c_ = 0, 1, 2
    g = DynamicGraph.from_edges(3, [(a, c_, 1.0), (b, c_, 1.0), (a, b, 1.0)], "ic")
    r = random.Random(8)
    coll = _collection(g, 20, r, start=c_)
    cost = _apply(coll, g, WeightUpdate(1, a, b, -1, 1.0), r)
    assert cost.updated == 20 and cost.retraversals == 0
    assert all(set(rr) == {a, b, c_} for rr in coll.sets.values())
    coll.check()


def test_bfs_edge_removal_drops_chain():
    a, b, c_ = 0, 1, 2
    g = DynamicGraph.from_edges(3, [(a, b, 1.0), (b, c_, 1.0)], "ic")
    r = random.Random(9)
    coll = _collection(g, 10, r, start=c_)
    cost = _apply(coll, g, WeightUpdate(1, b, c_, -1, 1.0), r)
    assert cost.retraversals == 10
    assert all(set(rr) == {c_} for rr in coll.sets.values())
    assert coll.degree(a) == coll.degree(b) == 0
    coll.check()


def test_retraversal_relabels():
    # c <- a, c <- b, b <- a: dropping the BFS edge (a, c) makes (a, b) a tree edge
    a, b, c_ = 0, 1, 2
    g = DynamicGraph.from_edges(3, [(a, c_, 1.0), (b, c_, 1.0), (a, b, 1.0)], "ic")
    r = random.Random(10)
    coll = _collection(g, 5, r, start=c_)
    _apply(coll, g, WeightUpdate(1, a, c_, -1, 1.0), r)
    for rr in coll.sets.values():
        assert rr.parent[a] == b and rr.parent[b] == c_ and rr.parent[c_] == SELF
        assert sorted(rr.live_edges()) == [(a, b, "BFS"), (b, c_, "BFS")]
        check_ic_set(rr, g)


def _shape(rr):
    return rr.start, _live(rr)


@pytest.mark.parametrize("seed", [1, 2])
def test_maintained_shapes_match_fresh_generation(seed):
    r = random.Random(seed)
    g = small_graph("ic", r, n=5, p=0.4)
    c = _collection(g, 20_000, r)
    for upd in random_stream(g, 25, r):
        _apply(c, g, upd, r)
    for rr in c.sets.values():
        check_ic_set(rr, g)
    c.check()
    fresh = Counter(_shape(generate_ic(g, r)) for _ in range(20_000))
    maintained = Counter(_shape(rr) for rr in c.sets.values())
    assert two_sample_chi2(maintained, fresh) > 0.001


def test_live_edge_marginals_after_stream():
    r = random.Random(21)
    g = small_graph("ic", r, n=5, p=0.5)
    stream = random_stream(g, 30, r)
    trackers = []
    for k in range(2000):
        tr = InfluenceTracker(g.copy(), 5, seed=k)
        trackers.append(tr)
    for upd in stream:
        for tr in trackers:
            tr.process_update(upd)
    final = trackers[0].graph
    # for each member v and in-edge (u, v): live with probability w_uv
    for v in range(final.n):
        for u, w in final.in_adj[v].items():
            exam = live = 0
            for tr in trackers:
                for rr in tr.collection.sets.values():
                    if v in rr:
                        exam += 1
                        live += u in rr.live[v]
            if exam >= 200:
                assert binomtest(live, exam, w).pvalue > 0.001, (u, v, w, live, exam)


def test_updated_sets_match_expected_cost():
    r = random.Random(31)
    g0 = small_graph("ic", r, n=5, p=0.5)
    stream = random_stream(g0, 12, r)
    g = g0.copy()
    expected = 0.0
    M, K = 200, 150
    for upd in stream:
        expected += M * exact_influence(g).values[upd.v] * upd.delta / g.n
        g.apply_update(upd)
    totals = []
    for k in range(K):
        tr = InfluenceTracker(g0.copy(), M, seed=5000 + k)
        totals.append(sum(tr.process_update(upd).updated for upd in stream))
    m, se = mean_se(totals)
    assert abs(m - expected) <= 3 * se
