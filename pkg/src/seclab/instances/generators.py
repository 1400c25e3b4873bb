"""Random and hand-built instance generators.

All random generators are pure functions of their seed and return instances
with pairwise distinct edge weights (duplicates are redrawn), except when the
weight law is a point mass and distinctness is impossible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .types import (
    EDGE_GROUPS,
    LEFT_VERTEX_GROUPS,
    GroupedInstance,
    HemHypergraph,
    HvmHypergraph,
    InstanceError,
    UndirectedGraph,
    WeightedBipartiteGraph,
)

_MAX_REDRAWS = 100


@dataclass(frozen=True)
class WeightLaw:
    """A weight distribution: ``uniform(a, b)``, ``exponential(rate)`` or ``powerlaw(alpha)``.

    ``powerlaw`` is a Pareto law with scale 1 and tail index ``alpha``.
    """

    name: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.name == "uniform":
            if len(self.params) != 2:
                raise ValueError("uniform needs (a, b)")
            a, b = self.params
            if not (0 <= a <= b) or not math.isfinite(b):
                raise ValueError(f"uniform needs 0 <= a <= b < inf, got {self.params}")
        elif self.name in ("exponential", "powerlaw"):
            if len(self.params) != 1:
                raise ValueError(f"{self.name} takes one parameter")
            (x,) = self.params
            if not (x > 0 and math.isfinite(x)):
                raise ValueError(f"{self.name} parameter must be positive, got {x}")
        else:
            raise ValueError(f"unknown weight law {self.name!r}")

    @property
    def degenerate(self) -> bool:
        return self.name == "uniform" and self.params[0] == self.params[1]

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.name == "uniform":
            a, b = self.params
            return a + (b - a) * rng.random(size)
        if self.name == "exponential":
            return rng.exponential(1.0 / self.params[0], size)
        return (1.0 - rng.random(size)) ** (-1.0 / self.params[0])

    @classmethod
    def parse(cls, text: str) -> "WeightLaw":
        """Parse ``name:p1[:p2]``, e.g. ``uniform:0:1`` or ``exponential:2``."""
        name, *rest = text.split(":")
        try:
            params = tuple(float(x) for x in rest)
        except ValueError as exc:
            raise ValueError(f"bad weight law {text!r}") from exc
        return cls(name, params)

    def __str__(self) -> str:
        return ":".join([self.name, *(repr(p) for p in self.params)])


def uniform(a: float, b: float) -> WeightLaw:
    return WeightLaw("uniform", (float(a), float(b)))


def exponential(rate: float) -> WeightLaw:
    return WeightLaw("exponential", (float(rate),))


def powerlaw(alpha: float) -> WeightLaw:
    return WeightLaw("powerlaw", (float(alpha),))


def _distinct_weights(law: WeightLaw, rng: np.random.Generator, size: int) -> list[float]:
    weights = law.sample(rng, size)
    if law.degenerate:
        return [float(w) for w in weights]
    for _ in range(_MAX_REDRAWS):
        _, first = np.unique(weights, return_index=True)
        dup = np.ones(size, dtype=bool)
        dup[first] = False
        if not dup.any():
            return [float(w) for w in weights]
        weights[dup] = law.sample(rng, int(dup.sum()))
    raise InstanceError(f"could not draw {size} distinct weights from {law}")


def _check_probability(q: float, what: str = "edge_probability") -> None:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"{what} must lie in [0, 1], got {q}")


def gen_random_bipartite(
    left_count: int,
    right_count: int,
    edge_probability: float,
    weight_law: WeightLaw = uniform(0, 1),
    seed: int = 0,
) -> WeightedBipartiteGraph:
    if left_count < 1 or right_count < 1:
        raise ValueError("vertex counts must be positive")
    _check_probability(edge_probability)
    rng = np.random.default_rng(seed)
    keep = rng.random((left_count, right_count)) < edge_probability
    pairs = [(int(l), int(r)) for l, r in zip(*np.nonzero(keep))]
    weights = _distinct_weights(weight_law, rng, len(pairs))
    return WeightedBipartiteGraph(
        left_count, right_count, tuple((l, r, w) for (l, r), w in zip(pairs, weights))
    )


def gen_random_hvm(
    left_count: int,
    right_count: int,
    d: int,
    max_options: int = 3,
    weight_law: WeightLaw = uniform(0, 1),
    seed: int = 0,
) -> HvmHypergraph:
    """Each left vertex bids on 1..max_options distinct bundles of 1..d right vertices."""
    if left_count < 1 or right_count < 1 or d < 1 or max_options < 1:
        raise ValueError("counts, d and max_options must be positive")
    rng = np.random.default_rng(seed)
    d_eff = min(d, right_count)
    raw = []
    for l in range(left_count):
        bundles: set[frozenset[int]] = set()
        for _ in range(int(rng.integers(1, max_options + 1))):
            size = int(rng.integers(1, d_eff + 1))
            bundles.add(frozenset(int(x) for x in rng.choice(right_count, size, replace=False)))
        raw.extend((l, b) for b in sorted(bundles, key=sorted))
    weights = _distinct_weights(weight_law, rng, len(raw))
    return HvmHypergraph(
        left_count, right_count, d, tuple((l, b, w) for (l, b), w in zip(raw, weights))
    )


def gen_random_hem(
    vertex_count: int,
    edge_count: int,
    d: int,
    weight_law: WeightLaw = uniform(0, 1),
    seed: int = 0,
) -> HemHypergraph:
    if vertex_count < 1 or d < 1 or edge_count < 0:
        raise ValueError("vertex_count and d must be positive")
    rng = np.random.default_rng(seed)
    d_eff = min(d, vertex_count)
    sets = []
    for _ in range(edge_count):
        size = int(rng.integers(1, d_eff + 1))
        sets.append(frozenset(int(x) for x in rng.choice(vertex_count, size, replace=False)))
    weights = _distinct_weights(weight_law, rng, edge_count)
    return HemHypergraph(vertex_count, d, tuple(zip(sets, weights)))


def gen_random_graph(
    vertex_count: int,
    edge_probability: float,
    weight_law: WeightLaw = uniform(0, 1),
    seed: int = 0,
) -> UndirectedGraph:
    """G(n, q) with weights; each unordered pair u < v appears independently."""
    if vertex_count < 1:
        raise ValueError("vertex_count must be positive")
    _check_probability(edge_probability)
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(vertex_count, k=1)
    keep = rng.random(len(iu)) < edge_probability
    pairs = [(int(u), int(v)) for u, v in zip(iu[keep], iv[keep])]
    weights = _distinct_weights(weight_law, rng, len(pairs))
    return UndirectedGraph(vertex_count, tuple((u, v, w) for (u, v), w in zip(pairs, weights)))


def gen_random_grouped(
    left_count: int,
    right_count: int,
    edge_probability: float,
    group_count: int,
    weight_law: WeightLaw = uniform(0, 1),
    seed: int = 0,
) -> GroupedInstance:
    """Random bipartite graph with its left vertices split into ``group_count`` nonempty groups."""
    if not 1 <= group_count <= left_count:
        raise ValueError("need 1 <= group_count <= left_count")
    base = gen_random_bipartite(left_count, right_count, edge_probability, weight_law, seed)
    rng = np.random.default_rng([seed, 1])
    perm = [int(x) for x in rng.permutation(left_count)]
    # every group gets one vertex first, the rest land uniformly
    labels = list(range(group_count)) + [int(x) for x in rng.integers(0, group_count, left_count - group_count)]
    groups: list[list[int]] = [[] for _ in range(group_count)]
    for l, g in zip(perm, labels):
        groups[g].append(l)
    return GroupedInstance(base, LEFT_VERTEX_GROUPS, tuple(tuple(sorted(g)) for g in groups))


def gen_star(leaf_count: int, weight_law: WeightLaw = uniform(0, 1), seed: int = 0) -> WeightedBipartiteGraph:
    """``leaf_count`` left vertices, each with a single edge into right vertex 0."""
    if leaf_count < 1:
        raise ValueError("leaf_count must be positive")
    rng = np.random.default_rng(seed)
    weights = _distinct_weights(weight_law, rng, leaf_count)
    return WeightedBipartiteGraph(leaf_count, 1, tuple((l, 0, w) for l, w in enumerate(weights)))


def gen_groups_counterexample(n: int, epsilon: float) -> GroupedInstance:
    """Two edge groups on which pricing from a sampled group fails.

    Vertices l_i, r_i are ids i-1.  Group 0 is the diagonal (l_i, r_i) with
    weight 1 + 2i*eps; group 1 the shifted edges (l_i, r_{i+1}) with weight
    1 + (2i+1)*eps.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < epsilon < 1.0 / (2 * n * n):
        raise ValueError(f"epsilon must lie in (0, 1/(2n^2)) = (0, {1.0 / (2 * n * n)!r}), got {epsilon!r}")
    diagonal = [(i - 1, i - 1, 1 + 2 * i * epsilon) for i in range(1, n + 1)]
    shifted = [(i - 1, i, 1 + (2 * i + 1) * epsilon) for i in range(1, n)]
    if len({w for _, _, w in diagonal + shifted}) != 2 * n - 1:
        raise ValueError(f"epsilon={epsilon!r} is too small to give distinct double-precision weights")
    base = WeightedBipartiteGraph(n, n, tuple(diagonal + shifted))
    return GroupedInstance(base, EDGE_GROUPS, (tuple(range(n)), tuple(range(n, 2 * n - 1))))


FIGURE2_LEFT = ("A", "B", "C")
FIGURE2_RIGHT = ("X", "Y")


def gen_figure2() -> GroupedInstance:
    """Three bidders A, B, C and two slots X, Y; A and C form one group, B the other."""
    A, B, C = 0, 1, 2
    X, Y = 0, 1
    base = WeightedBipartiteGraph(3, 2, ((A, X, 4.0), (B, X, 3.0), (B, Y, 2.0), (C, Y, 1.0)))
    return GroupedInstance(base, LEFT_VERTEX_GROUPS, ((A, C), (B,)))


def singleton_groups(g: WeightedBipartiteGraph) -> GroupedInstance:
    return GroupedInstance(g, LEFT_VERTEX_GROUPS, tuple((l,) for l in range(g.left_count)))


def reduce_hem_to_hvm(h: HemHypergraph) -> HvmHypergraph:
    """One new arriving vertex per hyperedge; the original vertices become the fixed side."""
    return HvmHypergraph(
        len(h.edges), h.vertex_count, h.d, tuple((i, vs, w) for i, (vs, w) in enumerate(h.edges))
    )


GENERATORS: dict[str, Callable] = {
    "random-bipartite": gen_random_bipartite,
    "random-hvm": gen_random_hvm,
    "random-hem": gen_random_hem,
    "random-graph": gen_random_graph,
    "random-grouped": gen_random_grouped,
    "star": gen_star,
    "counterexample": gen_groups_counterexample,
    "figure2": gen_figure2,
}
