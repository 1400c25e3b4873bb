"""Offline benchmarks: greedy solutions and exact optima.

The greedy routines double as subroutines of the online algorithms, so they
all scan edges in the shared comparator order (heavier first, ties by lower
edge index) and are independent of how the caller listed the edges.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.optimize import linear_sum_assignment

from .instances.types import (
    EdgeSet,
    HvmHypergraph,
    UndirectedGraph,
    WeightedBipartiteGraph,
    edge_order_key,
)

HYPERGRAPH_EDGE_BUDGET = 25
SECRETARY_ENUMERATION_BUDGET = 10


class OracleBudgetError(RuntimeError):
    """The exact oracle refuses an instance larger than its search budget."""


def greedy_from_sorted(rows: Iterable[tuple[int, int, int, float]]) -> list[int]:
    """Greedy matching over (edge_id, left, right, weight) rows already in comparator order."""
    used_left: set[int] = set()
    used_right: set[int] = set()
    chosen = []
    for eid, l, r, _ in rows:
        if l not in used_left and r not in used_right:
            used_left.add(l)
            used_right.add(r)
            chosen.append(eid)
    return chosen


def greedy_matching(g: WeightedBipartiteGraph) -> EdgeSet:
    return g.edge_set(greedy_from_sorted(g.sorted_edges))


def greedy_hypergraph_from_sorted(rows: Iterable[tuple[int, int, frozenset[int], float]]) -> list[int]:
    used_left: set[int] = set()
    used_right: set[int] = set()
    chosen = []
    for eid, l, rs, _ in rows:
        if l not in used_left and used_right.isdisjoint(rs):
            used_left.add(l)
            used_right.update(rs)
            chosen.append(eid)
    return chosen


def greedy_hypergraph(h: HvmHypergraph) -> EdgeSet:
    return h.edge_set(greedy_hypergraph_from_sorted(h.sorted_edges))


def optimal_bipartite(g: WeightedBipartiteGraph) -> EdgeSet:
    """Maximum-weight matching via the rectangular assignment problem.

    Absent pairs get weight 0, which is harmless because weights are nonnegative;
    such pairs are dropped from the answer.
    """
    if not g.edges:
        return EdgeSet.empty()
    weight = np.zeros((g.left_count, g.right_count))
    index = {}
    for i, (l, r, w) in enumerate(g.edges):
        weight[l, r] = w
        index[l, r] = i
    rows, cols = linear_sum_assignment(weight, maximize=True)
    chosen = [index[l, r] for l, r in zip(rows.tolist(), cols.tolist()) if (l, r) in index]
    return g.edge_set(chosen)


def optimal_hypergraph(h: HvmHypergraph, budget: int = HYPERGRAPH_EDGE_BUDGET) -> EdgeSet:
    """Exact max-weight disjoint edge set by depth-first branch and bound.

    Edges are branched on in comparator order (take before skip) and a branch is
    cut once its weight plus all remaining weight cannot beat the incumbent.
    """
    m = len(h.edges)
    if m > budget:
        raise OracleBudgetError(f"{m} hyperedges exceed the exact-search budget of {budget}")
    rows = h.sorted_edges
    masks = [(1 << l, sum(1 << r for r in rs), w) for _, l, rs, w in rows]
    suffix = [0.0] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] + masks[i][2]

    best_weight = -1.0
    best: list[int] = []
    stack: list[int] = []

    def dfs(i: int, left: int, right: int, total: float) -> None:
        nonlocal best_weight, best
        if total > best_weight:
            best_weight, best = total, list(stack)
        if i == m or total + suffix[i] <= best_weight:
            return
        lm, rm, w = masks[i]
        if not (left & lm) and not (right & rm):
            stack.append(i)
            dfs(i + 1, left | lm, right | rm, total + w)
            stack.pop()
        dfs(i + 1, left, right, total)

    dfs(0, 0, 0, 0.0)
    return h.edge_set(rows[i][0] for i in best)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def is_forest(vertex_count: int, edges: Iterable[tuple[int, int]]) -> bool:
    uf = _UnionFind(vertex_count)
    return all(uf.union(u, v) for u, v in edges)


def max_weight_forest(g: UndirectedGraph) -> EdgeSet:
    """Kruskal on decreasing weight; optimal because forests form a matroid."""
    order = sorted(range(len(g.edges)), key=lambda i: edge_order_key(g.edges[i][2], i))
    uf = _UnionFind(g.vertex_count)
    chosen = [i for i in order if uf.union(g.edges[i][0], g.edges[i][1])]
    return g.edge_set(chosen)


def heaviest_out_edges(g: UndirectedGraph, orientation: int) -> list[float]:
    """Weight of each vertex's heaviest out-edge; orientation 0 points edges to the lower id, 1 to the higher."""
    best = [0.0] * g.vertex_count
    for u, v, w in g.edges:
        tail = max(u, v) if orientation == 0 else min(u, v)
        if w > best[tail]:
            best[tail] = w
    return best


def check_orientation_bound(g: UndirectedGraph) -> tuple[float, float]:
    """Return (sum over v of its heaviest out-edge in both orientations, max forest weight)."""
    total = math.fsum(heaviest_out_edges(g, 0) + heaviest_out_edges(g, 1))
    forest = max_weight_forest(g).total_weight
    assert total >= forest, f"orientation sum {total} below forest weight {forest}"
    return total, forest


def secretary_success_prob_exact(n: int, cutoff: int) -> Fraction:
    """Probability that observe-then-beat-the-max with the given cutoff picks the maximum.

    Exhaustive over all n! arrival orders of ranks 0..n-1.
    """
    if not 1 <= n <= SECRETARY_ENUMERATION_BUDGET:
        raise OracleBudgetError(f"n={n} outside the enumeration budget 1..{SECRETARY_ENUMERATION_BUDGET}")
    if not 0 <= cutoff < n:
        raise ValueError(f"cutoff must lie in [0, {n}), got {cutoff}")
    wins = 0
    top = n - 1
    for perm in itertools.permutations(range(n)):
        bar = max(perm[:cutoff], default=-1)
        picked = next((x for x in perm[cutoff:] if x > bar), None)
        wins += picked == top
    return Fraction(wins, math.factorial(n))
