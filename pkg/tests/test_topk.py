import math
import random
import warnings

import pytest
from hypothesis import given, strategies as st

from rivulet.errors import DegenerateQuantile, InvalidConfig
from rivulet.graph import DynamicGraph, WeightUpdate
from rivulet.micro import load_micro
from rivulet.rr_ic import generate_ic
from rivulet.stream import build_graph
from rivulet.synthetic import star
from rivulet.topk import (
    TopKConfig,
    TopKTracker,
    filter_threshold,
    refined_filter_threshold,
    trivial_imax_lower_bound,
)

from conftest import random_stream

pytestmark = pytest.mark.filterwarnings("ignore:epsilon=")


def test_refined_threshold_worked_example():
    # eps1 = 0.0005 * sqrt(0.005875 / 0.032), evaluated at 40 digits with mpmath
    eps1 = 2.142392062625326e-4
    theta = refined_filter_threshold(0.006, 0.008, 0.0005)
    assert theta == pytest.approx(0.006 - 0.0005 / 4 - eps1 / 2, rel=1e-12)
    assert theta == pytest.approx(0.005767880396868734, rel=1e-12)


def test_refined_threshold_maximal_case():
    eps, x = 0.01, 0.3
    theta = refined_filter_threshold(x, x, eps)
    eps1 = 2 * (x - eps / 4 - theta)
    assert 0 < eps1 < eps / 2


def test_refined_threshold_boundary():
    assert refined_filter_threshold(0.0025, 0.5, 0.01) == pytest.approx(0.0, abs=1e-18)


def test_degenerate_quantile_fallback():
    with pytest.raises(DegenerateQuantile):
        refined_filter_threshold(0.001, 0.5, 0.01)
    assert filter_threshold(0.001, 0.5, 0.01) == 0.0
    assert filter_threshold(0.0024, 0.5, 0.01) == 0.0


@given(f=st.floats(0, 1), x=st.floats(1e-4, 2), eps=st.floats(1e-4, 0.5))
def test_theta_never_looser_than_half_eps(f, x, eps):
    assert filter_threshold(f, x, eps) >= f - eps / 2 - 1e-15


def test_config_validation():
    g = DynamicGraph(3)
    with pytest.raises(InvalidConfig):
        TopKTracker(g, TopKConfig(4, 0.1, 0.1))
    with pytest.raises(InvalidConfig):
        TopKTracker(g, TopKConfig(1, 1.5, 0.1))
    with pytest.raises(InvalidConfig):
        TopKTracker(g, TopKConfig(1, 0.1, 0.1), resize_every=0)


def test_large_epsilon_warns():
    g = DynamicGraph(100)
    with pytest.warns(UserWarning, match="epsilon"):
        TopKTracker(g, TopKConfig(1, 0.05, 0.1), seed=0)


def test_empty_graph_stops_at_floor():
    n, eps, delta = 100, 0.05, 0.1
    tk = TopKTracker(DynamicGraph(n), TopKConfig(1, eps, delta), seed=1)
    assert tk.M == math.ceil(192 / eps * math.log(2 * n / delta))
    assert tk.x >= 4 * eps
    assert tk.shrink_if_redundant() == 0


def _ic_star(n):
    return build_graph(*star(n, weight=1.0), "ic")


def test_deterministic_fixed_point_and_shrink():
    # hub 0 lies in every set, so F* = 1 and the fixed point is exact
    eps, delta = 0.1, 0.1
    tk = TopKTracker(_ic_star(20), TopKConfig(1, eps, delta), seed=2)
    fixed = tk.M
    log_term = math.log(2 * 20 / delta)
    assert fixed == math.floor(48 * log_term * (1 + eps) / eps**2) + 1
    for _ in range(fixed):
        tk.R.add(generate_ic(tk.graph, tk.rng_R))
    assert tk.shrink_if_redundant() == fixed
    assert tk.M == fixed


def test_no_deletion_when_sufficient():
    tk = TopKTracker(_ic_star(20), TopKConfig(1, 0.1, 0.1), seed=3)
    assert tk.shrink_if_redundant() == 0  # popping one more set would break sufficiency


def _shrink_oracle(members, floor, eps, log_term, n):
    """Final |R| using a plain count array over prefixes of the set order."""
    counts = [0] * n
    for ms in members:
        for u in ms:
            counts[u] += 1
    size = len(members)
    x = lambda s: s * eps * eps / (48 * log_term)  # noqa: E731
    while size > floor and max(counts) / size < x(size) - eps:
        for u in members[size - 1]:
            counts[u] -= 1
        if size - 1 < floor or max(counts) / (size - 1) >= x(size - 1) - eps:
            break
        size -= 1
    return size


@pytest.mark.parametrize("seed", range(4))
def test_shrink_matches_bruteforce(seed):
    g, _ = load_micro("triangle_chord", "ic")
    tk = TopKTracker(g, TopKConfig(1, 0.2, 0.2), seed=seed)
    r = random.Random(seed)
    for _ in range(tk.M):
        tk.R.add(generate_ic(g, r))
    members = [list(rr.nodes()) for rr in tk.R.sets.values()]
    expected = _shrink_oracle(members, tk.floor, 0.2, tk.log_term, g.n)
    tk.shrink_if_redundant()
    assert tk.M == expected
    assert tk.R.max_fraction() < tk.x - 0.2 or tk.M < tk.floor + 1
    tk.R.check()


def test_sizing_never_reads_selection():
    tk = TopKTracker(_ic_star(10), TopKConfig(1, 0.1, 0.1), seed=4)

    class Forbidden:
        def __getattr__(self, name):
            raise AssertionError("sizing touched R1")

    tk.R1 = Forbidden()
    tk.grow_to_sufficiency()
    tk.shrink_if_redundant()


def test_sizes_stay_equal_over_long_stream():
    r = random.Random(6)
    g = DynamicGraph(30, "lt")
    for _ in range(60):
        u, v = r.randrange(30), r.randrange(30)
        if u != v:
            g.add_weight(u, v, 1.0)
    for v in range(30):
        g.add_weight(v, v, 1.0)
    cfg = TopKConfig(3, 0.25, 0.2)
    tk = TopKTracker(g, cfg, seed=7)
    stream = random_stream(g, 10_000, r)
    lnt = math.log(2 * g.n / cfg.delta)
    for i, upd in enumerate(stream):
        tk.process_update(upd)
        assert len(tk.R) == len(tk.R1)
        assert tk.x == len(tk.R) * cfg.epsilon**2 / (48 * lnt)
        assert tk.M >= 48 * max(4 * cfg.epsilon, tk.R.max_fraction()) / cfg.epsilon**2 * lnt - 1e-9
        if i % 2500 == 0:
            tk.validate()
    tk.validate()


def test_resize_batching():
    r = random.Random(8)
    g = build_graph(*star(12, self_weight=1.0), "lt")
    tk = TopKTracker(g, TopKConfig(1, 0.2, 0.2), seed=8, resize_every=5)
    for upd in random_stream(g, 12, r):
        tk.process_update(upd)
    assert tk._pending == 2
    tk.report()
    assert tk._pending == 0 and len(tk.R) == len(tk.R1)


def test_shrinks_after_hub_loses_edges():
    n = 40
    g = build_graph(*star(n, weight=4.0, self_weight=1.0), "lt")
    cfg = TopKConfig(1, 0.1, 0.1)
    tk = TopKTracker(g, cfg, seed=9)
    start = tk.M
    sizes = []
    for t, v in enumerate(range(1, n), 1):
        tk.process_update(WeightUpdate(t, 0, v, -1, 4.0))
        sizes.append(tk.M)
    assert sizes[-1] < start * 0.6
    fresh = [TopKTracker(g.copy(), cfg, seed=100 + s).M for s in range(5)]
    mean_fresh = sum(fresh) / len(fresh)
    assert abs(tk.M - mean_fresh) / mean_fresh < 0.1


def test_report_contents():
    g = _ic_star(10)
    tk = TopKTracker(g, TopKConfig(1, 0.1, 0.1), seed=10)
    rep = tk.report()
    assert rep.ids == {0}
    d = rep.to_dict()
    assert list(d) == ["t", "mode", "k", "nodes", "M", "x", "theta", "epsilon", "delta"]
    assert d["theta"] >= tk.R1.kth_fraction(1) - 0.05


def test_symmetric_cycle_reports_everyone():
    g, exact = load_micro("cycle", "ic")
    cfg = TopKConfig(2, 0.2, 0.1)
    for seed in range(10):
        rep = TopKTracker(g.copy(), cfg, seed=seed).report()
        assert len(rep.ids) >= cfg.k
        assert {0, 1} <= rep.ids
        for u in rep.ids:
            assert abs(exact[u] - exact.kth(cfg.k)) <= cfg.epsilon * g.n


@pytest.mark.parametrize("model", ["lt", "ic"])
def test_accurate_selection_implies_report_guarantee(model):
    g, exact = load_micro("two_component", model)
    n = g.n
    cfg = TopKConfig(2, 0.2, 0.1)
    ik = exact.kth(cfg.k)
    checked = 0
    for seed in range(30):
        tk = TopKTracker(g.copy(), cfg, seed=seed)
        est = [n * tk.R1.fraction(u) for u in range(n)]
        if all(abs(est[u] - exact[u]) <= cfg.epsilon * n / 4 for u in range(n)):
            checked += 1
            ids = tk.report().ids
            assert exact.at_least(ik) <= ids
            assert all(exact[u] >= ik - cfg.epsilon * n for u in ids)
    assert checked >= 20


def test_trivial_lower_bound():
    g = build_graph(*star(5, weight=1.0, self_weight=1.0), "lt")
    assert trivial_imax_lower_bound(g) == pytest.approx(1 + 4 * 0.5)
