"""Timing harness: incremental stream replay versus rebuilding from scratch."""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .graph import DynamicGraph, WeightUpdate
from .rng import make_random
from .threshold import ThresholdConfig, ThresholdTracker
from .topk import TopKConfig, TopKTracker
from .tracker import fill
from .rrindex import RRCollection


@dataclass
class BenchResult:
    mode: str
    n: int
    M: int
    build_seconds: float
    stream_seconds: float
    rebuild_seconds: float
    update_seconds: list[float] = field(default_factory=list)
    # per update: (retrieved, candidates, updated, retraversals)
    touched: list[tuple[int, int, int, int]] = field(default_factory=list)

    @property
    def updates(self) -> int:
        return len(self.update_seconds)

    @property
    def mean_update_seconds(self) -> float:
        return self.stream_seconds / self.updates if self.updates else 0.0

    @property
    def update_to_rebuild(self) -> float:
        """Mean per-update cost as a fraction of one rebuild."""
        return self.mean_update_seconds / self.rebuild_seconds if self.rebuild_seconds else 0.0

    @property
    def stream_to_build(self) -> float:
        return self.stream_seconds / self.build_seconds if self.build_seconds else 0.0

    def percentiles(self) -> dict[str, float]:
        return timing_percentiles(self.update_seconds)

    def summary(self) -> dict:
        t = np.array(self.touched, dtype=float).reshape(-1, 4)
        mean = t.mean(axis=0) if len(t) else np.zeros(4)
        return {
            "mode": self.mode,
            "n": self.n,
            "M": self.M,
            "updates": self.updates,
            "build_seconds": self.build_seconds,
            "stream_seconds": self.stream_seconds,
            "rebuild_seconds": self.rebuild_seconds,
            "mean_update_seconds": self.mean_update_seconds,
            "update_to_rebuild": self.update_to_rebuild,
            "stream_to_build": self.stream_to_build,
            "mean_retrieved": float(mean[0]),
            "mean_candidates": float(mean[1]),
            "mean_updated": float(mean[2]),
            "mean_retraversals": float(mean[3]),
            **{f"update_{k}": v for k, v in self.percentiles().items()},
        }

    def write_summary_csv(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "value"])
        for k, v in self.summary().items():
            w.writerow([k, v])

    def write_updates_csv(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "seconds", "retrieved", "candidates", "updated", "retraversals"])
        for i, (s, c) in enumerate(zip(self.update_seconds, self.touched)):
            w.writerow([i, s, *c])


def timing_percentiles(samples: Sequence[float]) -> dict[str, float]:
    if not len(samples):
        return {"p50": 0.0, "p90": 0.0, "p99": 0.0, "max": 0.0}
    a = np.asarray(samples)
    p50, p90, p99 = np.percentile(a, [50, 90, 99])
    return {"p50": float(p50), "p90": float(p90), "p99": float(p99), "max": float(a.max())}


def _sum_costs(cost) -> tuple[int, int, int, int]:
    if isinstance(cost, tuple) and cost and isinstance(cost[0], tuple):
        return tuple(sum(c[i] for c in cost) for i in range(4))  # type: ignore[return-value]
    return tuple(cost)  # type: ignore[return-value]


def run_bench(base: DynamicGraph, stream: Sequence[WeightUpdate], config, seed: int | None = None,
              resize_every: int = 1, rebuild: bool = True) -> BenchResult:
    """Replay ``stream`` on ``base`` (mutated in place) and time each phase.

    The rebuild phase samples a fresh collection of the final size on the
    final graph, which is what a non-incremental tracker would redo.
    """
    t0 = time.perf_counter()
    if isinstance(config, ThresholdConfig):
        tracker = ThresholdTracker(base, config, seed=seed)
        mode = "threshold"
    elif isinstance(config, TopKConfig):
        tracker = TopKTracker(base, config, seed=seed, resize_every=resize_every)
        mode = "topk"
    else:
        raise TypeError(f"unsupported config {config!r}")
    build = time.perf_counter() - t0

    per: list[float] = []
    touched: list[tuple[int, int, int, int]] = []
    clock = time.perf_counter
    s0 = clock()
    for upd in stream:
        a = clock()
        cost = tracker.process_update(upd)
        per.append(clock() - a)
        touched.append(_sum_costs(cost))
    stream_s = clock() - s0

    rebuild_s = 0.0
    if rebuild:
        r0 = clock()
        if mode == "threshold":
            coll = RRCollection(base.n)
            fill(coll, base, tracker.M, make_random(None if seed is None else seed + 1))
        else:
            TopKTracker(base, config, seed=None if seed is None else seed + 1)
        rebuild_s = clock() - r0
    return BenchResult(mode, base.n, tracker.M, build, stream_s, rebuild_s, per, touched)
