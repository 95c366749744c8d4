from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable


@dataclass
class TrackerReport:
    """Snapshot of the tracked influential nodes at time ``t``.

    ``nodes`` holds ``(id, estimate)`` pairs ranked by estimate, where the
    estimate is ``n * F_R(u)`` in expected-node units.
    """

    t: int
    mode: str
    nodes: list[tuple[int, float]]
    M: int
    epsilon: float
    delta: float
    T: float | None = None
    k: int | None = None
    x: float | None = None
    theta: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def ids(self) -> set[int]:
        return {u for u, _ in self.nodes}

    def to_dict(self) -> dict:
        nodes = [{"id": u, "est": est} for u, est in self.nodes]
        if self.mode == "threshold":
            d = {"t": self.t, "mode": self.mode, "nodes": nodes, "M": self.M,
                 "T": self.T, "epsilon": self.epsilon, "delta": self.delta}
        else:
            d = {"t": self.t, "mode": self.mode, "k": self.k, "nodes": nodes,
                 "M": self.M, "x": self.x, "theta": self.theta,
                 "epsilon": self.epsilon, "delta": self.delta}
        d.update(self.extra)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "TrackerReport":
        known = {"t", "mode", "nodes", "M", "T", "k", "x", "theta", "epsilon", "delta"}
        return cls(
            t=d["t"],
            mode=d["mode"],
            nodes=[(n["id"], n["est"]) for n in d["nodes"]],
            M=d["M"],
            epsilon=d["epsilon"],
            delta=d["delta"],
            T=d.get("T"),
            k=d.get("k"),
            x=d.get("x"),
            theta=d.get("theta"),
            extra={key: val for key, val in d.items() if key not in known},
        )


def read_reports(lines: Iterable[str]) -> list[TrackerReport]:
    return [TrackerReport.from_dict(json.loads(ln)) for ln in lines if ln.strip()]


def jaccard(a: Iterable[int], b: Iterable[int]) -> float:
    a, b = set(a), set(b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)
