"""Single-choice secretary rules, with and without adversarial groups."""
from __future__ import annotations

import math
from typing import Any, Callable

from .stream import ArrivalStream


def classical_cutoff(n: int) -> int:
    """Number of leading arrivals to observe: floor(n / e)."""
    return math.floor(n / math.e)


def _observe_then_beat(
    stream: ArrivalStream, n: int, best_of: Callable[[int, Any], tuple[float, int] | None]
) -> int | None:
    cutoff = classical_cutoff(n)
    stream.log.observed = cutoff
    bar = -math.inf
    chosen = None
    for idx, uid, payload in stream:
        top = best_of(uid, payload)
        if top is None:
            continue
        weight, element = top
        if idx < cutoff:
            if weight > bar:
                bar = weight
        elif chosen is None and weight > bar:
            chosen = element
            stream.accept((element,))
    return chosen


def run_classical_secretary(stream: ArrivalStream, n: int) -> int | None:
    """Observe floor(n/e) weights, then take the first one above everything observed.

    Units are element ids and payloads their weights; returns the chosen id.
    """
    return _observe_then_beat(stream, n, lambda uid, weight: (weight, uid))


def _group_best(uid: int, members) -> tuple[float, int] | None:
    if not members:
        return None
    element, weight = min(members, key=lambda m: (-m[1], m[0]))
    return weight, element


def run_grouped_secretary(stream: ArrivalStream, group_count: int) -> int | None:
    """Keep only the best element of each arriving group and run the classical rule on groups.

    Payloads are sequences of (element_id, weight); returns the chosen element id.
    """
    return _observe_then_beat(stream, group_count, _group_best)
