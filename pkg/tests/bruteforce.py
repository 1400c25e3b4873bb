"""Exhaustive reference answers, deliberately naive and independent of the package code."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def best_matching_weight(edges: list[tuple[int, int, float]]) -> float:
    """Max total weight over all subsets of edges forming a matching (recursive include/exclude)."""

    def go(i: int, used_l: frozenset, used_r: frozenset) -> float:
        if i == len(edges):
            return 0.0
        l, r, w = edges[i]
        skip = go(i + 1, used_l, used_r)
        if l in used_l or r in used_r:
            return skip
        return max(skip, w + go(i + 1, used_l | {l}, used_r | {r}))

    return go(0, frozenset(), frozenset())


def best_disjoint_weight(edges: list[tuple[int, frozenset, float]]) -> float:
    """Max weight of pairwise-disjoint hyperedges (left vertex plus right set), by trying every subset."""
    best = 0.0
    for size in range(len(edges) + 1):
        for subset in combinations(edges, size):
            lefts = [e[0] for e in subset]
            rights = [r for e in subset for r in e[1]]
            if len(set(lefts)) == len(lefts) and len(set(rights)) == len(rights):
                best = max(best, sum(e[2] for e in subset))
    return best


def acyclic(n: int, edges) -> bool:
    """Acyclicity by repeatedly deleting leaves; a forest reduces to nothing."""
    adj = {v: [] for v in range(n)}
    for i, (u, v) in enumerate(edges):
        adj[u].append(i)
        adj[v].append(i)
    alive = set(range(len(edges)))
    changed = True
    while changed:
        changed = False
        for v in range(n):
            incident = [i for i in adj[v] if i in alive]
            if len(incident) == 1:
                alive.discard(incident[0])
                changed = True
    return not alive


def best_forest_weight(n: int, edges: list[tuple[int, int, float]]) -> float:
    best = 0.0
    for size in range(len(edges) + 1):
        for subset in combinations(edges, size):
            if acyclic(n, [(u, v) for u, v, _ in subset]):
                best = max(best, sum(w for _, _, w in subset))
    return best


def secretary_closed_form(n: int, r: int) -> Fraction:
    """P[observe r then take first record picks the maximum] = (r/n) * sum_{j=r+1}^{n} 1/(j-1); 1/n when r = 0."""
    if r == 0:
        return Fraction(1, n)
    return Fraction(r, n) * sum(Fraction(1, j - 1) for j in range(r + 1, n + 1))


def counterexample_expectation(n: int, eps: float, p: float = 0.5) -> float:
    """Expected revenue of naive grouped pricing on the two-group construction, by the four sampling cases.

    Both sampled: 0.  Only E1 sampled: 0.  Only E2 sampled: the single edge
    (l_n, r_n).  Neither sampled: whichever group arrives first is taken whole.
    """
    e1 = n + n * (n + 1) * eps
    e2 = (n - 1) + (n - 1) * (n + 1) * eps
    only_e2 = 1 + 2 * n * eps
    return p * (1 - p) * only_e2 + (1 - p) ** 2 * (e1 + e2) / 2


__all__ = [
    "best_matching_weight",
    "best_disjoint_weight",
    "acyclic",
    "best_forest_weight",
    "secretary_closed_form",
    "counterexample_expectation",
]
