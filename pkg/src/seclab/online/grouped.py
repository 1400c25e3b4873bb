"""Matching when an adversary groups the arriving elements.

Units are groups; each payload is the tuple of (edge_id, left, right, weight)
rows the group reveals, in comparator order.
"""
from __future__ import annotations

import math
from collections import Counter

from ..instances.types import EdgeSet
from .bipartite import SimulateResult
from .stream import ArrivalStream, DecisionLog, draw_sample_size

Row = tuple[int, int, int, float]


def ceil_log2(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    return (n - 1).bit_length()


def threshold_exponents(n_elements: int) -> range:
    """Candidate exponents j for the threshold w / 2**j: 0 .. 1 + ceil(log2 n)."""
    return range(0, 2 + ceil_log2(n_elements))


def grouped_threshold_match(
    stream: ArrivalStream, group_count: int, n_elements: int
) -> tuple[EdgeSet, DecisionLog]:
    """Observe the first half of the groups, then greedily match edges above a random scale of the best seen.

    The threshold is w / 2**j with w the heaviest observed edge and j uniform
    over :func:`threshold_exponents`.
    """
    half = math.ceil(group_count / 2)
    j = stream.rng.choice(threshold_exponents(n_elements))
    stream.log.observed = half
    stream.log.params["j"] = j
    heaviest = 0.0
    threshold = None
    used_left: set[int] = set()
    used_right: set[int] = set()
    chosen: dict[int, float] = {}
    for idx, _, rows in stream:
        if idx < half:
            for row in rows:
                heaviest = max(heaviest, row[3])
            continue
        if threshold is None:
            threshold = heaviest / 2**j
            stream.log.params["threshold"] = threshold
        taken = []
        for eid, l, r, w in rows:
            if w >= threshold and l not in used_left and r not in used_right:
                used_left.add(l)
                used_right.add(r)
                chosen[eid] = w
                taken.append(eid)
        if taken:
            stream.accept(taken)
    return EdgeSet.from_weights(chosen), stream.log


def _greedy(rows: list[Row]) -> list[Row]:
    """Greedy matching over (edge_id, left, right, weight) rows in any order."""
    keyed = sorted((-w, eid, l, r) for eid, l, r, w in rows)
    used_left: set[int] = set()
    used_right: set[int] = set()
    out = []
    for negw, eid, l, r in keyed:
        if l not in used_left and r not in used_right:
            used_left.add(l)
            used_right.add(r)
            out.append((eid, l, r, -negw))
    return out


def naive_grouped_sample_and_price(
    stream: ArrivalStream, group_count: int, p: float = 0.5, *, sample_size: int | None = None
) -> tuple[EdgeSet, DecisionLog]:
    """Sample-and-price carried over unchanged to edge groups; it can earn far below the optimum.

    A Binomial(groups, p) prefix of groups is sampled; the greedy matching on the
    sampled edges prices both endpoints of each of its edges.  Later groups are
    scanned edge by edge and an edge is sold when it reaches both endpoint prices
    and both endpoints are free.
    """
    k = draw_sample_size(stream, group_count, p) if sample_size is None else sample_size
    stream.log.observed = k
    stream.log.params["k"] = k
    sample: list[Row] = []
    left_price: dict[int, float] | None = None
    right_price: dict[int, float] = {}
    used_left: set[int] = set()
    used_right: set[int] = set()
    chosen: dict[int, float] = {}
    for idx, _, rows in stream:
        if idx < k:
            sample.extend(rows)
            continue
        if left_price is None:
            left_price = {}
            for _, l, r, w in _greedy(sample):
                left_price[l] = w
                right_price[r] = w
        taken = []
        for eid, l, r, w in rows:
            if (
                w >= left_price.get(l, 0.0)
                and w >= right_price.get(r, 0.0)
                and l not in used_left
                and r not in used_right
            ):
                used_left.add(l)
                used_right.add(r)
                chosen[eid] = w
                taken.append(eid)
        if taken:
            stream.accept(taken)
    return EdgeSet.from_weights(chosen), stream.log


def sample_with_groups(
    stream: ArrivalStream, group_count: int, p: float = 0.5, *, sample_size: int | None = None
) -> SimulateResult:
    """Analysis construction for grouped vertex arrivals.

    M1 is the greedy matching on a Binomial(groups, p) prefix of sampled groups.
    Each later group g contributes to M2 exactly the edges that the greedy
    matching on (sampled groups + g) gives to g's own vertices.  M3 deletes all
    M2 edges at right vertices of M2-degree above one.  ``coin_record`` maps
    group ids to True when sampled.
    """
    k = draw_sample_size(stream, group_count, p) if sample_size is None else sample_size
    stream.log.observed = k
    stream.log.params["k"] = k
    sample: list[Row] = []
    coins: dict[int, bool] = {}
    m1: list[Row] | None = None
    m2: list[Row] = []
    for idx, gid, rows in stream:
        coins[gid] = idx < k
        if idx < k:
            sample.extend(rows)
            continue
        if m1 is None:
            m1 = _greedy(sample)
        own = {row[0] for row in rows}
        m2.extend(row for row in _greedy(sample + list(rows)) if row[0] in own)
    if m1 is None:
        m1 = _greedy(sample)
    degree = Counter(row[2] for row in m2)
    return SimulateResult(
        EdgeSet.from_weights({row[0]: row[3] for row in m1}),
        EdgeSet.from_weights({row[0]: row[3] for row in m2}),
        EdgeSet.from_weights({row[0]: row[3] for row in m2 if degree[row[2]] == 1}),
        coins,
    )
