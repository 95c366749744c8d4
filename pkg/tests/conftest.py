import random

import pytest

from rivulet.fuzz import random_update
from rivulet.graph import DynamicGraph, Model


def random_stream(g: DynamicGraph, count: int, rng: random.Random, allow_self: bool = True):
    """Updates valid when applied in order; ``g`` is left unchanged."""
    shadow = g.copy()
    out = []
    t = 0
    while len(out) < count:
        upd = random_update(shadow, rng, t + 1, allow_self)
        if upd is None:
            continue
        t += 1
        shadow.apply_update(upd)
        out.append(upd)
    return out


def small_graph(model, rng: random.Random, n: int = 5, p: float = 0.5) -> DynamicGraph:
    g = DynamicGraph(n, model)
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                g.add_weight(u, v, rng.uniform(0.1, 0.6) if g.model is Model.IC else rng.uniform(0.5, 2.0))
    if g.model is Model.LT:
        for v in range(n):
            g.add_weight(v, v, rng.uniform(0.2, 1.0))
    return g


@pytest.fixture
def rng():
    return random.Random(12345)


def two_sample_chi2(a, b, min_expected: float = 5.0) -> float:
    """p-value of a chi-square homogeneity test between two Counters.

    Categories too rare for the asymptotics are pooled into one bin.
    """
    from scipy.stats import chi2_contingency

    na, nb = sum(a.values()), sum(b.values())
    keys = set(a) | set(b)
    total = na + nb
    rows_a, rows_b = [], []
    pool_a = pool_b = 0
    for key in keys:
        ca, cb = a.get(key, 0), b.get(key, 0)
        if (ca + cb) * min(na, nb) / total < min_expected:
            pool_a += ca
            pool_b += cb
        else:
            rows_a.append(ca)
            rows_b.append(cb)
    if pool_a + pool_b:
        rows_a.append(pool_a)
        rows_b.append(pool_b)
    if len(rows_a) < 2:
        return 1.0
    return chi2_contingency([rows_a, rows_b])[1]


def mean_se(xs):
    """Sample mean and its standard error."""
    import math

    m = sum(xs) / len(xs)
    return m, math.sqrt(sum((x - m) ** 2 for x in xs) / (len(xs) - 1) / len(xs))
