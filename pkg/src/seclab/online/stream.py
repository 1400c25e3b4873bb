"""Random-order arrival streams with an audit trail of irrevocable decisions."""
from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterator, NamedTuple, Sequence


class StreamError(RuntimeError):
    """An algorithm broke the one-decision-per-arrival contract."""


class Decision(NamedTuple):
    index: int
    unit: int
    accepted: tuple[int, ...] = ()
    # what the algorithm was prepared to take, accepted or not (e.g. its best priced edge)
    proposed: tuple[int, ...] = ()

    @property
    def action(self) -> str:
        return "accept" if self.accepted else "reject"


@dataclass
class DecisionLog:
    entries: list[Decision] = field(default_factory=list)
    # number of leading arrivals the algorithm only observed
    observed: int = 0
    # internal random choices worth auditing, e.g. the sample size or a coin
    params: dict[str, Any] = field(default_factory=dict)

    def accepted_edges(self) -> frozenset[int]:
        return frozenset(e for d in self.entries for e in d.accepted)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def as_rows(self) -> list[tuple[int, int, str, tuple[int, ...]]]:
        return [(d.index, d.unit, d.action, d.accepted) for d in self.entries]


class ArrivalStream:
    """Hands units to an algorithm one at a time, in a seeded uniform random order.

    Only the current unit is ever exposed; there is no accessor for units that
    have not arrived.  The algorithm records its decision for the current unit
    with :meth:`accept` or :meth:`reject`; an arrival left undecided is logged
    as rejected when the stream advances.  ``rng`` continues the generator that
    drew the arrival order and is the algorithm's only source of randomness.
    """

    __slots__ = ("rng", "log", "cursor", "_payloads", "_order", "_decided")

    def __init__(self, payloads: Sequence[Any], seed: int | None = None, order: Sequence[int] | None = None):
        self.rng = random.Random(seed)
        n = len(payloads)
        if order is None:
            order = list(range(n))
            self.rng.shuffle(order)
        elif sorted(order) != list(range(n)):
            raise ValueError("order must be a permutation of the unit ids")
        self._payloads = payloads
        self._order = list(order)
        self.log = DecisionLog()
        self.cursor = -1
        self._decided = True

    def __len__(self) -> int:
        return len(self._order)

    def __iter__(self) -> Iterator[tuple[int, int, Any]]:
        if self.cursor != -1:
            raise StreamError("a stream can be consumed only once")
        for idx, uid in enumerate(self._order):
            self._close()
            self.cursor = idx
            self._decided = False
            yield idx, uid, self._payloads[uid]
        self._close()

    def _close(self) -> None:
        if not self._decided:
            self.log.entries.append(Decision(self.cursor, self._order[self.cursor]))
            self._decided = True

    def accept(self, edge_ids: Sequence[int], proposed: Sequence[int] | None = None) -> None:
        self._record(tuple(edge_ids), tuple(edge_ids if proposed is None else proposed))

    def reject(self, proposed: Sequence[int] = ()) -> None:
        self._record((), tuple(proposed))

    def _record(self, accepted: tuple[int, ...], proposed: tuple[int, ...]) -> None:
        if self._decided:
            raise StreamError(f"unit at arrival {self.cursor} already decided or not yet arrived")
        self.log.entries.append(Decision(self.cursor, self._order[self.cursor], accepted, proposed))
        self._decided = True


@lru_cache(maxsize=256)
def _binomial_cdf(n: int, p: float) -> tuple[float, ...]:
    cdf, acc = [], 0.0
    for k in range(n + 1):
        acc += math.comb(n, k) * p**k * (1 - p) ** (n - k)
        cdf.append(acc)
    return tuple(cdf)


def binomial_inverse_cdf(n: int, p: float, u: float) -> int:
    """Smallest k with P[Binom(n, p) <= k] > u, for a uniform draw u in [0, 1)."""
    if n == 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    k = bisect_right(_binomial_cdf(n, p), u)
    return min(k, n)


def draw_sample_size(stream: ArrivalStream, n: int, p: float) -> int:
    return binomial_inverse_cdf(n, p, stream.rng.random())
