"""Instance files: one JSON object per file, one edge per line.

Weights are written as ``repr`` decimal strings, which round-trip IEEE doubles
exactly.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .types import (
    GroupedInstance,
    HemHypergraph,
    HvmHypergraph,
    Instance,
    InstanceError,
    UndirectedGraph,
    WeightedBipartiteGraph,
)


class InstanceFormatError(ValueError):
    """A malformed instance file; the message names the offending line or field."""


def _w(x: float) -> str:
    return repr(float(x))


def _encode_edges(inst: Instance) -> list[list[Any]]:
    if isinstance(inst, (WeightedBipartiteGraph, UndirectedGraph)):
        return [[a, b, _w(w)] for a, b, w in inst.edges]
    if isinstance(inst, HvmHypergraph):
        return [[l, sorted(rs), _w(w)] for l, rs, w in inst.edges]
    if isinstance(inst, HemHypergraph):
        return [[sorted(vs), _w(w)] for vs, w in inst.edges]
    if isinstance(inst, GroupedInstance):
        return _encode_edges(inst.base)
    raise TypeError(f"not an instance: {type(inst).__name__}")


def _meta(inst: Instance) -> dict[str, Any]:
    if isinstance(inst, WeightedBipartiteGraph):
        return {"left_count": inst.left_count, "right_count": inst.right_count}
    if isinstance(inst, HvmHypergraph):
        return {"left_count": inst.left_count, "right_count": inst.right_count, "d": inst.d}
    if isinstance(inst, HemHypergraph):
        return {"vertex_count": inst.vertex_count, "d": inst.d}
    if isinstance(inst, UndirectedGraph):
        return {"vertex_count": inst.vertex_count}
    return {**_meta(inst.base), "grouping_mode": inst.grouping_mode}


def dumps_instance(inst: Instance) -> str:
    head = {"kind": inst.kind, "meta": _meta(inst)}
    lines = ["{", f'  "kind": {json.dumps(head["kind"])},', f'  "meta": {json.dumps(head["meta"], sort_keys=True)},']
    edges = _encode_edges(inst)
    body = ",\n".join("    " + json.dumps(e) for e in edges)
    tail_comma = "," if isinstance(inst, GroupedInstance) else ""
    lines.append('  "edges": [' + ("\n" + body + "\n  " if edges else "") + "]" + tail_comma)
    if isinstance(inst, GroupedInstance):
        gbody = ",\n".join("    " + json.dumps(list(g)) for g in inst.groups)
        lines.append('  "groups": [' + ("\n" + gbody + "\n  " if inst.groups else "") + "]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps_instance(inst))


def _field(obj: dict, key: str, where: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise InstanceFormatError(f"{where}: missing field {key!r}")
    return obj[key]


def _int(x: Any, where: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool):
        raise InstanceFormatError(f"{where}: expected integer, got {x!r}")
    return x


def _weight(x: Any, where: str) -> float:
    if not isinstance(x, str):
        raise InstanceFormatError(f"{where}: weight must be a decimal string, got {x!r}")
    try:
        return float(x)
    except ValueError:
        raise InstanceFormatError(f"{where}: weight {x!r} is not a decimal number") from None


def _ids(x: Any, where: str) -> frozenset[int]:
    if not isinstance(x, list):
        raise InstanceFormatError(f"{where}: expected an array of ids, got {x!r}")
    return frozenset(_int(v, where) for v in x)


def _row(edge: Any, n: int, where: str) -> list:
    if not isinstance(edge, list) or len(edge) != n:
        raise InstanceFormatError(f"{where}: expected an array of {n} items, got {edge!r}")
    return edge


def _decode(doc: Any) -> Instance:
    kind = _field(doc, "kind", "document")
    meta = _field(doc, "meta", "document")
    edges = _field(doc, "edges", "document")
    if not isinstance(edges, list):
        raise InstanceFormatError("edges: expected an array")

    def m(key: str) -> int:
        return _int(_field(meta, key, "meta"), f"meta.{key}")

    if kind in ("bipartite", "grouped", "graph"):
        rows = []
        for i, e in enumerate(edges):
            a, b, w = _row(e, 3, f"edges[{i}]")
            rows.append((_int(a, f"edges[{i}][0]"), _int(b, f"edges[{i}][1]"), _weight(w, f"edges[{i}][2]")))
        if kind == "graph":
            return UndirectedGraph(m("vertex_count"), tuple(rows))
        base = WeightedBipartiteGraph(m("left_count"), m("right_count"), tuple(rows))
        if kind == "bipartite":
            return base
        groups = _field(doc, "groups", "document")
        if not isinstance(groups, list):
            raise InstanceFormatError("groups: expected an array")
        mode = _field(meta, "grouping_mode", "meta")
        parsed = []
        for gi, g in enumerate(groups):
            if not isinstance(g, list):
                raise InstanceFormatError(f"groups[{gi}]: expected an array, got {g!r}")
            parsed.append(tuple(_int(x, f"groups[{gi}]") for x in g))
        return GroupedInstance(base, mode, tuple(parsed))
    if kind == "hvm":
        rows = []
        for i, e in enumerate(edges):
            l, rs, w = _row(e, 3, f"edges[{i}]")
            rows.append((_int(l, f"edges[{i}][0]"), _ids(rs, f"edges[{i}][1]"), _weight(w, f"edges[{i}][2]")))
        return HvmHypergraph(m("left_count"), m("right_count"), m("d"), tuple(rows))
    if kind == "hem":
        rows = []
        for i, e in enumerate(edges):
            vs, w = _row(e, 2, f"edges[{i}]")
            rows.append((_ids(vs, f"edges[{i}][0]"), _weight(w, f"edges[{i}][1]")))
        return HemHypergraph(m("vertex_count"), m("d"), tuple(rows))
    raise InstanceFormatError(f"kind: unknown instance kind {kind!r}")


def loads_instance(text: str, source: str = "<string>") -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return _decode(doc)
    except InstanceFormatError as exc:
        raise InstanceFormatError(f"{source}: {exc}") from None
    except InstanceError as exc:
        raise InstanceFormatError(f"{source}: invalid instance: {exc}") from None


def load_instance(path: str | Path) -> Instance:
    path = Path(path)
    return loads_instance(path.read_text(), str(path))
