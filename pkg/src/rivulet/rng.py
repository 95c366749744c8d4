"""Seeding: one seed per tracker, split into independent per-collection streams."""
from __future__ import annotations

import random

import numpy as np


def spawn_randoms(seed: int | None, count: int) -> list[random.Random]:
    """``count`` independent ``random.Random`` streams derived from ``seed``.

    ``numpy.random.SeedSequence`` does the splitting; the hot loops then
    draw from the stdlib generator, which is far cheaper per scalar.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [
        random.Random(int.from_bytes(c.generate_state(4, np.uint64).tobytes(), "little"))
        for c in children
    ]


def make_random(seed: int | None) -> random.Random:
    return spawn_randoms(seed, 1)[0]
