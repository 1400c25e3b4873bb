"""Vertex-at-a-time bipartite matching: the coin-flip analysis construction and sample-and-price."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Collection

from ..instances.types import EdgeSet, WeightedBipartiteGraph
from .stream import ArrivalStream, DecisionLog, draw_sample_size


@dataclass(frozen=True)
class SimulateResult:
    """Coin-flip split of the greedily considered edges.

    ``m1`` holds heads, ``m2`` tails, and ``m3`` the tails edges that survive
    pruning.  ``coin_record`` maps each unit that flipped a coin to True for heads.
    """

    m1: EdgeSet
    m2: EdgeSet
    m3: EdgeSet
    coin_record: dict[int, bool] = field(default_factory=dict)


def bvm_simulate(
    g: WeightedBipartiteGraph,
    p: float,
    seed: int | None = None,
    *,
    heads: Collection[int] | None = None,
) -> SimulateResult:
    """Scan edges heaviest first; the first eligible edge of each left vertex goes to M1 or M2 by a p-coin.

    An edge is eligible while its left vertex has flipped no coin and its right
    vertex is free in M1.  M3 drops every right vertex of M2-degree above one.
    Passing ``heads`` fixes the coins: a vertex comes up heads iff it is in ``heads``.
    """
    rng = random.Random(seed)
    coins: dict[int, bool] = {}
    taken_right: set[int] = set()
    m1: dict[int, float] = {}
    m2: list[tuple[int, int, float]] = []
    for eid, l, r, w in g.sorted_edges:
        if l in coins or r in taken_right:
            continue
        head = (l in heads) if heads is not None else rng.random() < p
        coins[l] = head
        if head:
            m1[eid] = w
            taken_right.add(r)
        else:
            m2.append((eid, r, w))
    degree = Counter(r for _, r, _ in m2)
    return SimulateResult(
        EdgeSet.from_weights(m1),
        EdgeSet.from_weights({eid: w for eid, _, w in m2}),
        EdgeSet.from_weights({eid: w for eid, r, w in m2 if degree[r] == 1}),
        coins,
    )


def prices_from_sample(rows: list[tuple[float, int, int, int]]) -> dict[int, float]:
    """Greedy matching on sampled (-weight, edge_id, left, right) rows; matched right vertices are priced at their edge weight.

    Rows sort naturally into comparator order.
    """
    rows.sort()
    price: dict[int, float] = {}
    used_left: set[int] = set()
    for negw, _, l, r in rows:
        if l not in used_left and r not in price:
            used_left.add(l)
            price[r] = -negw
    return price


def bvm_sample_and_price(
    stream: ArrivalStream,
    left_count: int,
    right_count: int,
    p: float = 0.5,
    *,
    sample_size: int | None = None,
) -> tuple[EdgeSet, DecisionLog]:
    """Price right vertices from a greedy matching on a Binomial(|L|, p) prefix, then sell above price.

    Each later vertex proposes its heaviest edge whose weight reaches the price
    of its right endpoint (absent prices are 0) and gets it if that endpoint is
    still free.  Payload edges are (edge_id, right, weight) in comparator order.
    ``sample_size`` overrides the binomial draw.
    """
    k = draw_sample_size(stream, left_count, p) if sample_size is None else sample_size
    stream.log.observed = k
    stream.log.params["k"] = k
    sample: list[tuple[float, int, int, int]] = []
    price: dict[int, float] | None = None
    sold: set[int] = set()
    chosen: dict[int, float] = {}
    for idx, l, edges in stream:
        if idx < k:
            sample.extend((-w, eid, l, r) for eid, r, w in edges)
            continue
        if price is None:
            price = prices_from_sample(sample)
        for eid, r, w in edges:
            if w >= price.get(r, 0.0):
                if r in sold:
                    stream.reject(proposed=(eid,))
                else:
                    sold.add(r)
                    chosen[eid] = w
                    stream.accept((eid,))
                break
    return EdgeSet.from_weights(chosen), stream.log
