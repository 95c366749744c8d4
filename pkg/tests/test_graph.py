import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from rivulet.errors import NegativeResultingWeight, ProbabilityOverflow, SelfWeightInIC, UnknownNode
from rivulet.graph import SELF, DynamicGraph, Model, WeightUpdate, sample_prev

from conftest import random_stream


def test_lt_increase_updates_edge_and_total():
    g = DynamicGraph.from_edges(2, [(0, 1, 1.0)], "lt", {1: 1.0})
    assert g.total_weight[1] == 2.0
    d = g.apply_update(WeightUpdate(1, 0, 1, 1, 1.0))
    assert g.weight(0, 1) == 2.0 and g.total_weight[1] == 3.0
    assert (d.w_before, d.w_after, d.W_before, d.W_after) == (1.0, 2.0, 2.0, 3.0)


def test_ic_increase_and_overflow():
    g = DynamicGraph.from_edges(2, [(0, 1, 0.2)], "ic")
    g.apply_update(WeightUpdate(1, 0, 1, 1, 0.2))
    assert g.weight(0, 1) == pytest.approx(0.4)
    g2 = DynamicGraph.from_edges(2, [(0, 1, 0.9)], "ic")
    with pytest.raises(ProbabilityOverflow):
        g2.apply_update(WeightUpdate(1, 0, 1, 1, 0.2))
    assert g2.weight(0, 1) == 0.9


def test_ic_rejects_self_weight():
    g = DynamicGraph(3, "ic")
    with pytest.raises(SelfWeightInIC):
        g.apply_update(WeightUpdate(1, 2, 2, 1, 0.5))


def test_decrease_below_zero_rejected():
    g = DynamicGraph.from_edges(2, [(0, 1, 1.0)], "lt")
    with pytest.raises(NegativeResultingWeight):
        g.apply_update(WeightUpdate(1, 0, 1, -1, 1.5))
    with pytest.raises(NegativeResultingWeight):
        g.apply_update(WeightUpdate(1, 1, 0, -1, 0.5))


def test_unknown_node():
    g = DynamicGraph(3)
    with pytest.raises(UnknownNode):
        g.apply_update(WeightUpdate(1, 0, 3, 1, 1.0))
    with pytest.raises(UnknownNode):
        g.in_neighbors(7)


def test_weight_update_validation():
    with pytest.raises(ValueError):
        WeightUpdate(1, 0, 1, 1, 0.0)
    with pytest.raises(ValueError):
        WeightUpdate(1, 0, 1, 2, 1.0)


def test_in_neighbors_and_zero_weight_removal():
    g = DynamicGraph(2)
    assert g.in_neighbors(1) == []
    g.apply_update(WeightUpdate(1, 0, 1, 1, 1.0))
    assert g.in_neighbors(1) == [(0, 1.0)]
    g.apply_update(WeightUpdate(2, 0, 1, -1, 1.0))
    assert g.in_neighbors(1) == []
    assert g.m == 0


def test_influence_probability():
    g = DynamicGraph.from_edges(3, [(0, 2, 3.0), (1, 2, 1.0)], "lt", {2: 4.0})
    assert g.influence_probability(0, 2) == pytest.approx(3 / 8)
    assert sum(g.influence_probability(u, 2) for u in (0, 1)) <= 1.0


def test_sample_prev_without_weight_is_self():
    g = DynamicGraph.from_edges(2, [], "lt", {1: 1.0})
    r = random.Random(0)
    assert {g.sample_previous_node_lt(1, r) for _ in range(100)} == {SELF}
    assert g.sample_previous_node_lt(0, r) == SELF  # W = 0


def test_sample_prev_rounding_overshoot():
    assert sample_prev({3: 0.1, 4: 0.2}, 0.3, 0.0, 1.0 - 1e-17) == 4


def _chi2(g, v, draws, seed):
    r = random.Random(seed)
    counts = Counter(g.sample_previous_node_lt(v, r) for _ in range(draws))
    W = g.total_weight[v]
    keys = list(g.in_adj[v]) + ([SELF] if g.self_weight[v] > 0 else [])
    expected = [(g.in_adj[v][k] if k != SELF else g.self_weight[v]) / W * draws for k in keys]
    assert set(counts) <= set(keys)
    return counts, chisquare([counts[k] for k in keys], expected).pvalue


def test_sample_prev_half_half():
    g = DynamicGraph.from_edges(2, [(0, 1, 1.0)], "lt", {1: 1.0})
    counts, p = _chi2(g, 1, 100_000, 1)
    assert abs(counts[0] / 100_000 - 0.5) <= 0.01
    assert p > 0.001


def test_sample_prev_three_to_one():
    g = DynamicGraph.from_edges(3, [(0, 2, 3.0), (1, 2, 1.0)], "lt")
    counts, p = _chi2(g, 2, 100_000, 2)
    assert abs(counts[0] / 100_000 - 0.75) <= 0.01
    assert SELF not in counts
    assert p > 0.001


def test_sample_prev_chi_square_random_node(rng):
    g = DynamicGraph(6, "lt")
    for u in range(5):
        g.add_weight(u, 5, rng.uniform(0.1, 3.0))
    g.add_weight(5, 5, 0.7)
    _, p = _chi2(g, 5, 100_000, 3)
    assert p > 0.001


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), model=st.sampled_from(["lt", "ic"]), count=st.integers(1, 150))
def test_totals_match_recomputation(seed, model, count):
    r = random.Random(seed)
    g = DynamicGraph(6, model)
    for upd in random_stream(g, count, r):
        g.apply_update(upd)
    for v in range(g.n):
        exact = g.self_weight[v] + math.fsum(g.in_adj[v].values())
        if g.model is Model.LT:
            assert math.isclose(g.total_weight[v], exact, rel_tol=1e-9, abs_tol=1e-12)
        else:
            assert all(0 < w <= 1 for w in g.in_adj[v].values())
        assert all(w > 0 for w in g.in_adj[v].values())


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), model=st.sampled_from(["lt", "ic"]))
def test_increase_then_decrease_restores(seed, model):
    r = random.Random(seed)
    g = DynamicGraph(5, model)
    for upd in random_stream(g, 30, r):
        g.apply_update(upd)
    before = g.copy()
    u, v = r.randrange(5), r.randrange(5)
    if model == "ic" and u == v:
        v = (u + 1) % 5
    room = 1.0 - g.weight(u, v) if model == "ic" else 3.0
    if room <= 0:
        return
    delta = room * (1.0 - r.random())
    g.apply_update(WeightUpdate(1, u, v, 1, delta))
    g.apply_update(WeightUpdate(2, u, v, -1, delta))
    assert g.same_as(before)


def test_periodic_recompute(monkeypatch):
    import rivulet.graph as graph_mod

    monkeypatch.setattr(graph_mod, "RECOMPUTE_EVERY", 4)
    g = DynamicGraph(2, "lt")
    for i in range(9):
        g.apply_update(WeightUpdate(i, 0, 1, 1, 0.1))
    assert g.total_weight[1] == pytest.approx(0.9)
