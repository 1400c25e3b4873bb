"""Immutable problem instances for the four families of online matching problems.

Edges are stored as plain tuples so the online algorithms can unpack them
cheaply in their inner loops.  Every instance validates itself on
construction; after that it is never mutated and may be shared freely.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

LEFT_VERTEX_GROUPS = "left-vertex-groups"
EDGE_GROUPS = "edge-groups"
GROUPING_MODES = (LEFT_VERTEX_GROUPS, EDGE_GROUPS)


class InstanceError(ValueError):
    """An instance violates one of its structural invariants."""


def edge_order_key(weight: float, edge_id: int) -> tuple[float, int]:
    """Global comparator: heavier first, then lower edge index."""
    return (-weight, edge_id)


def _check_weight(weight: float, where: str) -> None:
    if not isinstance(weight, (int, float)) or isinstance(weight, bool):
        raise InstanceError(f"{where}: weight must be a real number, got {weight!r}")
    if math.isnan(weight) or weight < 0 or math.isinf(weight):
        raise InstanceError(f"{where}: weight must be finite and >= 0, got {weight!r}")


def _check_id(value: int, bound: int, what: str, where: str) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < bound:
        raise InstanceError(f"{where}: {what} {value!r} out of range [0, {bound})")


@dataclass(frozen=True)
class EdgeSet:
    """A subset of an instance's edge list together with its total weight."""

    edge_indices: frozenset[int]
    total_weight: float

    @classmethod
    def from_edges(cls, indices: Iterable[int], weights: Sequence[float]) -> "EdgeSet":
        ids = frozenset(indices)
        return cls(ids, math.fsum(weights[i] for i in sorted(ids)))

    @classmethod
    def from_weights(cls, weight_of: dict[int, float]) -> "EdgeSet":
        return cls(frozenset(weight_of), math.fsum(weight_of[i] for i in sorted(weight_of)))

    @classmethod
    def empty(cls) -> "EdgeSet":
        return cls(frozenset(), 0.0)

    def __len__(self) -> int:
        return len(self.edge_indices)

    def __contains__(self, edge_id: object) -> bool:
        return edge_id in self.edge_indices

    def __iter__(self):
        return iter(sorted(self.edge_indices))


@dataclass(frozen=True)
class WeightedBipartiteGraph:
    left_count: int
    right_count: int
    edges: tuple[tuple[int, int, float], ...] = ()

    kind = "bipartite"

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(l), int(r), w) for l, r, w in self.edges))
        if self.left_count < 1 or self.right_count < 1:
            raise InstanceError("left_count and right_count must be positive")
        seen = set()
        for i, (l, r, w) in enumerate(self.edges):
            where = f"edges[{i}]"
            _check_id(l, self.left_count, "left id", where)
            _check_id(r, self.right_count, "right id", where)
            _check_weight(w, where)
            if (l, r) in seen:
                raise InstanceError(f"{where}: duplicate edge ({l}, {r})")
            seen.add((l, r))

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, _, w in self.edges)

    @cached_property
    def sorted_edges(self) -> tuple[tuple[int, int, int, float], ...]:
        """(edge_id, left, right, weight) in comparator order."""
        rows = [(i, l, r, w) for i, (l, r, w) in enumerate(self.edges)]
        rows.sort(key=lambda row: edge_order_key(row[3], row[0]))
        return tuple(rows)

    @cached_property
    def left_payloads(self) -> tuple[tuple[tuple[int, int, float], ...], ...]:
        """Per left vertex, its incident edges as (edge_id, right, weight) in comparator order."""
        buckets: list[list[tuple[int, int, float]]] = [[] for _ in range(self.left_count)]
        for eid, l, r, w in self.sorted_edges:
            buckets[l].append((eid, r, w))
        return tuple(tuple(b) for b in buckets)

    def edge_set(self, indices: Iterable[int]) -> EdgeSet:
        return EdgeSet.from_edges(indices, self.weights)


@dataclass(frozen=True)
class HvmHypergraph:
    """Hyperedges each holding one left vertex and between 1 and ``d`` right vertices."""

    left_count: int
    right_count: int
    d: int
    edges: tuple[tuple[int, frozenset[int], float], ...] = ()

    kind = "hvm"

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple((int(l), frozenset(rs), w) for l, rs, w in self.edges)
        )
        if self.left_count < 0 or self.right_count < 1 or self.d < 1:
            raise InstanceError("right_count and d must be positive, left_count >= 0")
        for i, (l, rs, w) in enumerate(self.edges):
            where = f"edges[{i}]"
            _check_id(l, self.left_count, "left id", where)
            if not 1 <= len(rs) <= self.d:
                raise InstanceError(f"{where}: hyperedge has {len(rs)} right vertices, need 1..{self.d}")
            for r in rs:
                _check_id(r, self.right_count, "right id", where)
            _check_weight(w, where)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, _, w in self.edges)

    @cached_property
    def sorted_edges(self) -> tuple[tuple[int, int, frozenset[int], float], ...]:
        rows = [(i, l, rs, w) for i, (l, rs, w) in enumerate(self.edges)]
        rows.sort(key=lambda row: edge_order_key(row[3], row[0]))
        return tuple(rows)

    @cached_property
    def left_payloads(self) -> tuple[tuple[tuple[int, frozenset[int], float], ...], ...]:
        buckets: list[list] = [[] for _ in range(self.left_count)]
        for eid, l, rs, w in self.sorted_edges:
            buckets[l].append((eid, rs, w))
        return tuple(tuple(b) for b in buckets)

    def edge_set(self, indices: Iterable[int]) -> EdgeSet:
        return EdgeSet.from_edges(indices, self.weights)

    @classmethod
    def from_bipartite(cls, g: WeightedBipartiteGraph) -> "HvmHypergraph":
        """View a bipartite graph as the d = 1 hypergraph with the same edge indices."""
        return cls(g.left_count, g.right_count, 1, tuple((l, frozenset((r,)), w) for l, r, w in g.edges))


@dataclass(frozen=True)
class HemHypergraph:
    vertex_count: int
    d: int
    edges: tuple[tuple[frozenset[int], float], ...] = ()

    kind = "hem"

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((frozenset(vs), w) for vs, w in self.edges))
        if self.vertex_count < 1 or self.d < 1:
            raise InstanceError("vertex_count and d must be positive")
        for i, (vs, w) in enumerate(self.edges):
            where = f"edges[{i}]"
            if not 1 <= len(vs) <= self.d:
                raise InstanceError(f"{where}: hyperedge has {len(vs)} vertices, need 1..{self.d}")
            for v in vs:
                _check_id(v, self.vertex_count, "vertex id", where)
            _check_weight(w, where)


@dataclass(frozen=True)
class GroupedInstance:
    """A bipartite instance whose left vertices or edges an adversary has partitioned."""

    base: WeightedBipartiteGraph
    grouping_mode: str
    groups: tuple[tuple[int, ...], ...] = field(default=())

    kind = "grouped"

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(tuple(int(x) for x in g) for g in self.groups))
        if self.grouping_mode not in GROUPING_MODES:
            raise InstanceError(f"unknown grouping mode {self.grouping_mode!r}")
        universe = (
            self.base.left_count if self.grouping_mode == LEFT_VERTEX_GROUPS else len(self.base.edges)
        )
        seen: set[int] = set()
        for gi, members in enumerate(self.groups):
            if not members:
                raise InstanceError(f"groups[{gi}] is empty")
            for x in members:
                _check_id(x, universe, "member", f"groups[{gi}]")
                if x in seen:
                    raise InstanceError(f"groups[{gi}]: member {x} appears in two groups")
                seen.add(x)
        if len(seen) != universe:
            raise InstanceError(f"groups cover {len(seen)} of {universe} elements")

    @cached_property
    def group_payloads(self) -> tuple[tuple[tuple[int, int, int, float], ...], ...]:
        """Per group, every edge it reveals as (edge_id, left, right, weight) in comparator order."""
        out = []
        if self.grouping_mode == LEFT_VERTEX_GROUPS:
            for members in self.groups:
                ms = set(members)
                out.append(tuple(row for row in self.base.sorted_edges if row[1] in ms))
        else:
            for members in self.groups:
                rows = [(i, *self.base.edges[i]) for i in members]
                rows.sort(key=lambda row: edge_order_key(row[3], row[0]))
                out.append(tuple(rows))
        return tuple(out)

    def group_of_left(self) -> dict[int, int]:
        if self.grouping_mode != LEFT_VERTEX_GROUPS:
            raise InstanceError("group_of_left needs left-vertex groups")
        return {l: gi for gi, members in enumerate(self.groups) for l in members}


@dataclass(frozen=True)
class UndirectedGraph:
    """Weighted simple graph; vertex ids double as the fixed vertex ordering."""

    vertex_count: int
    edges: tuple[tuple[int, int, float], ...] = ()

    kind = "graph"

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v), w) for u, v, w in self.edges))
        if self.vertex_count < 1:
            raise InstanceError("vertex_count must be positive")
        for i, (u, v, w) in enumerate(self.edges):
            where = f"edges[{i}]"
            _check_id(u, self.vertex_count, "vertex id", where)
            _check_id(v, self.vertex_count, "vertex id", where)
            if u == v:
                raise InstanceError(f"{where}: self-loop at {u}")
            _check_weight(w, where)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, _, w in self.edges)

    @cached_property
    def edge_payloads(self) -> tuple[tuple[int, int, int, float], ...]:
        return tuple((i, u, v, w) for i, (u, v, w) in enumerate(self.edges))

    def edge_set(self, indices: Iterable[int]) -> EdgeSet:
        return EdgeSet.from_edges(indices, self.weights)


Instance = WeightedBipartiteGraph | HvmHypergraph | HemHypergraph | GroupedInstance | UndirectedGraph
