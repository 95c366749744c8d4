"""Bundled micro graphs (at most 6 nodes) with exactly enumerated influence.

``python -m rivulet.micro [DIR]`` rewrites the graph and table files from
the definitions below; tests check the bundled copies match.
"""
from __future__ import annotations

import os
import sys
from importlib import resources

from .graph import DynamicGraph, Model
from .oracle import InfluenceTable, exact_influence
from .stream import build_graph, parse_graph, write_graph

# name -> (n, LT edges incl. self-weights, IC edges)
MICRO_GRAPHS: dict[str, tuple[int, list, list]] = {
    "path": (
        5,
        [(0, 1, 2.0), (1, 2, 2.0), (2, 3, 2.0), (3, 4, 2.0)] + [(v, v, 1.0) for v in range(5)],
        [(0, 1, 0.7), (1, 2, 0.7), (2, 3, 0.7), (3, 4, 0.7)],
    ),
    "star": (
        6,
        [(0, v, 1.0) for v in range(1, 6)] + [(v, v, 0.5) for v in range(6)],
        [(0, v, 0.6) for v in range(1, 6)],
    ),
    "cycle": (
        5,
        [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 0, 1.0)] + [(v, v, 0.5) for v in range(5)],
        [(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5), (3, 4, 0.5), (4, 0, 0.5)],
    ),
    "triangle_chord": (
        4,
        [(0, 1, 2.0), (1, 2, 1.0), (2, 0, 0.5), (0, 2, 1.5), (2, 3, 3.0), (1, 1, 0.5), (2, 2, 0.5), (3, 3, 1.0)],
        [(0, 1, 0.8), (1, 2, 0.5), (2, 0, 0.3), (0, 2, 0.6), (2, 3, 0.9)],
    ),
    "two_component": (
        6,
        [(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (5, 3, 1.0), (0, 2, 1.0)]
        + [(1, 1, 0.25), (2, 2, 0.5), (3, 3, 1.0), (4, 4, 0.25), (5, 5, 0.25)],
        [(0, 1, 0.9), (1, 2, 0.4), (0, 2, 0.5), (3, 4, 0.8), (4, 5, 0.8), (5, 3, 0.8)],
    ),
}

MICRO_NAMES = tuple(MICRO_GRAPHS)


def micro_graph(name: str, model: Model | str) -> DynamicGraph:
    """Build a micro graph from its in-code definition."""
    n, lt, ic = MICRO_GRAPHS[name]
    return build_graph(n, lt if Model(model) is Model.LT else ic, model)


def _data_dir():
    return resources.files("rivulet") / "data" / "micro"


def load_micro(name: str, model: Model | str) -> tuple[DynamicGraph, InfluenceTable]:
    """The bundled graph file and its exact influence table."""
    model = Model(model)
    d = _data_dir()
    with (d / f"{name}.{model.value}.tsv").open(encoding="utf-8") as fh:
        g = parse_graph(fh, model)
    with (d / f"{name}.{model.value}.exact.tsv").open(encoding="utf-8") as fh:
        table = InfluenceTable.read_tsv(fh)
    return g, table


def regenerate(out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name in MICRO_NAMES:
        for model in Model:
            g = micro_graph(name, model)
            gp = os.path.join(out_dir, f"{name}.{model.value}.tsv")
            with open(gp, "w", encoding="utf-8") as fh:
                write_graph(fh, g)
            tp = os.path.join(out_dir, f"{name}.{model.value}.exact.tsv")
            with open(tp, "w", encoding="utf-8") as fh:
                exact_influence(g).write_tsv(fh)
            written += [gp, tp]
    return written


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "data", "micro")
    for p in regenerate(target):
        print(p)
