"""Hypergraph vertex-at-a-time matching (bundles of right vertices)."""
from __future__ import annotations

import random
from collections import Counter
from typing import Collection

from ..instances.types import EdgeSet, HvmHypergraph
from .bipartite import SimulateResult
from .stream import ArrivalStream, DecisionLog, draw_sample_size


def hvm_sample_probability(d: int) -> float:
    return 1.0 - 1.0 / (2 * d)


def hvm_simulate(
    h: HvmHypergraph,
    p: float,
    seed: int | None = None,
    *,
    heads: Collection[int] | None = None,
) -> SimulateResult:
    """Hypergraph analogue of :func:`bvm_simulate`; M3 keeps the M2 edges disjoint from all other M2 edges."""
    rng = random.Random(seed)
    coins: dict[int, bool] = {}
    taken: set[int] = set()
    m1: dict[int, float] = {}
    m2: list[tuple[int, frozenset[int], float]] = []
    for eid, l, rs, w in h.sorted_edges:
        if l in coins or not taken.isdisjoint(rs):
            continue
        head = (l in heads) if heads is not None else rng.random() < p
        coins[l] = head
        if head:
            m1[eid] = w
            taken.update(rs)
        else:
            m2.append((eid, rs, w))
    # left vertices are distinct within M2, so only right vertices can collide
    use = Counter(r for _, rs, _ in m2 for r in rs)
    return SimulateResult(
        EdgeSet.from_weights(m1),
        EdgeSet.from_weights({eid: w for eid, _, w in m2}),
        EdgeSet.from_weights({eid: w for eid, rs, w in m2 if all(use[r] == 1 for r in rs)}),
        coins,
    )


def hvm_sample_and_price(
    stream: ArrivalStream,
    left_count: int,
    right_count: int,
    d: int,
    *,
    sample_size: int | None = None,
) -> tuple[EdgeSet, DecisionLog]:
    """Sample-and-price with sampling probability 1 - 1/(2d).

    Every right vertex covered by the greedy solution on the sample is priced at
    the weight of its covering edge.  A later vertex proposes its heaviest edge
    that reaches the price of each of its right vertices and keeps it if the
    edge is disjoint from everything already sold.  Payload edges are
    (edge_id, right_ids, weight) in comparator order.
    """
    p = hvm_sample_probability(d)
    k = draw_sample_size(stream, left_count, p) if sample_size is None else sample_size
    stream.log.observed = k
    stream.log.params["k"] = k
    sample: list[tuple[float, int, int, frozenset[int]]] = []
    price: dict[int, float] | None = None
    sold: set[int] = set()
    chosen: dict[int, float] = {}
    for idx, l, edges in stream:
        if idx < k:
            sample.extend((-w, eid, l, rs) for eid, rs, w in edges)
            continue
        if price is None:
            sample.sort()
            price = {}
            used_left: set[int] = set()
            for negw, _, sl, rs in sample:
                if sl not in used_left and price.keys().isdisjoint(rs):
                    used_left.add(sl)
                    price.update(dict.fromkeys(rs, -negw))
        for eid, rs, w in edges:
            if all(w >= price.get(r, 0.0) for r in rs):
                if sold.isdisjoint(rs):
                    sold.update(rs)
                    chosen[eid] = w
                    stream.accept((eid,))
                else:
                    stream.reject(proposed=(eid,))
                break
    return EdgeSet.from_weights(chosen), stream.log
