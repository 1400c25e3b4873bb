"""Forest selection when graph edges arrive in random order.

A fair coin picks one of the two acyclic orientations of the graph by vertex
id; every vertex then runs its own secretary rule over its out-edges.  With at
most one chosen out-edge per vertex in an acyclic orientation, the result is
a forest.
"""
from __future__ import annotations

import math

from ..instances.types import EdgeSet
from .stream import ArrivalStream, DecisionLog


def orientation_tail(u: int, v: int, orientation: int) -> int:
    """Vertex an edge leaves: orientation 0 points from higher to lower id, 1 from lower to higher."""
    return max(u, v) if orientation == 0 else min(u, v)


def graphic_matroid_secretary(
    stream: ArrivalStream, vertex_count: int, edge_count: int
) -> tuple[EdgeSet, DecisionLog]:
    """Per-vertex secretaries sharing one arrival cutoff of floor(|E|/e).

    Before the cutoff each vertex only records its heaviest out-edge; afterwards
    a vertex takes its first out-edge heavier than that record, once.
    Payloads are (edge_id, u, v, weight).
    """
    orientation = 0 if stream.rng.random() < 0.5 else 1
    cutoff = math.floor(edge_count / math.e)
    stream.log.observed = cutoff
    stream.log.params["orientation"] = orientation
    bar = [-math.inf] * vertex_count
    done = [False] * vertex_count
    chosen: dict[int, float] = {}
    for idx, _, (eid, u, v, w) in stream:
        tail = orientation_tail(u, v, orientation)
        if idx < cutoff:
            if w > bar[tail]:
                bar[tail] = w
        elif not done[tail] and w > bar[tail]:
            done[tail] = True
            chosen[eid] = w
            stream.accept((eid,))
    return EdgeSet.from_weights(chosen), stream.log
