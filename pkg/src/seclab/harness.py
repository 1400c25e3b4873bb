"""Seeded Monte Carlo estimation of expected revenue and checks against the proven bounds.

Every trial draws its randomness from ``trial_seed(master_seed, index)``, the
index-th output of a SplitMix64 sequence, so results do not depend on how
trials are scheduled across workers.  Per-trial values are always reduced in
trial-index order.
"""
from __future__ import annotations

import csv
import io
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from itertools import permutations
from typing import Any

import numpy as np

from .instances.generators import gen_groups_counterexample, reduce_hem_to_hvm
from .instances.types import (
    EDGE_GROUPS,
    LEFT_VERTEX_GROUPS,
    GroupedInstance,
    HemHypergraph,
    HvmHypergraph,
    UndirectedGraph,
    WeightedBipartiteGraph,
)
from .online.bipartite import bvm_sample_and_price, bvm_simulate
from .online.graphic import graphic_matroid_secretary
from .online.grouped import (
    ceil_log2,
    grouped_threshold_match,
    naive_grouped_sample_and_price,
    sample_with_groups,
)
from .online.hypergraph import hvm_sample_and_price, hvm_sample_probability, hvm_simulate
from .online.secretary import run_classical_secretary, run_grouped_secretary
from .online.stream import ArrivalStream
from .oracles import (
    HYPERGRAPH_EDGE_BUDGET,
    OracleBudgetError,
    greedy_hypergraph,
    max_weight_forest,
    optimal_bipartite,
    optimal_hypergraph,
)

MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15
SLACK_SIGMAS = 3.0
FLAKY_GUARD_FACTOR = 10

SUITES = ("bvm", "hvm", "grouped_log", "graphic", "conjecture", "counterexample")


class HarnessError(ValueError):
    """Bad request to the harness: unknown algorithm, or instance and suite do not fit."""


def splitmix64(x: int) -> int:
    """SplitMix64 output function applied to the state ``x``."""
    z = (x + GOLDEN64) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Seed of trial ``trial_index``: the index-th SplitMix64 output from state ``master_seed``."""
    return splitmix64((master_seed + trial_index * GOLDEN64) & MASK64)


def derive_seed(master_seed: int, *labels: int) -> int:
    """Independent child seed for a labelled sub-experiment (instance index, grid point, ...)."""
    s = master_seed & MASK64
    for label in labels:
        s = splitmix64(s ^ splitmix64(label & MASK64))
    return s


# ---------------------------------------------------------------------------
# Estimates and checks


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    trials: int
    min: float
    max: float

    @classmethod
    def from_values(cls, values: Sequence[float] | np.ndarray) -> "Estimate":
        x = np.asarray(values, dtype=float)
        n = len(x)
        if n == 0:
            raise ValueError("need at least one trial")
        mean = float(x.mean())
        se = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        lo, hi = float(x.min()), float(x.max())
        # guard against the last-ulp drift of a float mean of constant data
        return cls(min(max(mean, lo), hi), se, n, lo, hi)


@dataclass(frozen=True)
class BoundCheck:
    """One statistical check of a Monte Carlo estimate against a theoretical value.

    ``kind`` is ``lower`` (mean must reach bound - slack*SE), ``upper`` (mean must
    stay below bound + slack*SE), ``equal`` (both), or ``info`` (reported only).
    """

    bound_name: str
    theoretical_lower: float
    estimate: Estimate
    slack_sigmas: float = SLACK_SIGMAS
    kind: str = "lower"
    algorithm: str = ""
    param: str = ""
    opt: float = 0.0
    opt_source: str = "exact"

    @property
    def verdict(self) -> str:
        m, se, b = self.estimate.mean, self.estimate.std_error, self.theoretical_lower
        slack = self.slack_sigmas * se
        if self.kind == "lower":
            ok = m >= b - slack
        elif self.kind == "upper":
            ok = m <= b + slack
        elif self.kind == "equal":
            ok = abs(m - b) <= slack
        else:
            return "info"
        return "pass" if ok else "fail"

    @property
    def flagged(self) -> bool:
        return self.kind == "info" or self.opt_source != "exact"


def run_trials(
    trial: Callable[[int], Sequence[float]],
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> np.ndarray:
    """Run ``trial(seed)`` for every trial index; returns a trials x metrics array in index order."""
    if trials < 1:
        raise HarnessError("trials must be at least 1")
    if workers <= 1 or trials < 2 * workers:
        rows = [trial(trial_seed(master_seed, i)) for i in range(trials)]
    else:
        bounds = np.linspace(0, trials, workers + 1).astype(int)
        chunks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(partial(_run_chunk, trial, master_seed), chunks)
            rows = [row for part in parts for row in part]
    return np.asarray(rows, dtype=float).reshape(trials, -1)


def _run_chunk(trial, master_seed: int, span: tuple[int, int]) -> list:
    return [trial(trial_seed(master_seed, i)) for i in range(*span)]


# ---------------------------------------------------------------------------
# Trial functions; each maps a trial seed to a tuple of metrics.


def bvm_trial(g: WeightedBipartiteGraph, p: float, seed: int) -> tuple[float, float, float, float]:
    """Coupled run: sample-and-price on a random order, and the coin-flip split whose heads are its sample."""
    stream = ArrivalStream(g.left_payloads, seed)
    m, log = bvm_sample_and_price(stream, g.left_count, g.right_count, p)
    heads = {d.unit for d in log.entries[: log.observed]}
    sim = bvm_simulate(g, p, heads=heads)
    return sim.m1.total_weight, sim.m2.total_weight, sim.m3.total_weight, m.total_weight


def hvm_trial(h: HvmHypergraph, d: int, seed: int) -> tuple[float, float, float, float]:
    stream = ArrivalStream(h.left_payloads, seed)
    m, log = hvm_sample_and_price(stream, h.left_count, h.right_count, d)
    heads = {x.unit for x in log.entries[: log.observed]}
    sim = hvm_simulate(h, hvm_sample_probability(d), heads=heads)
    return sim.m1.total_weight, sim.m2.total_weight, sim.m3.total_weight, m.total_weight


def grouped_threshold_trial(gi: GroupedInstance, n_elements: int, seed: int) -> tuple[float]:
    stream = ArrivalStream(gi.group_payloads, seed)
    m, _ = grouped_threshold_match(stream, len(gi.groups), n_elements)
    return (m.total_weight,)


def naive_grouped_trial(gi: GroupedInstance, p: float, seed: int) -> tuple[float]:
    stream = ArrivalStream(gi.group_payloads, seed)
    m, _ = naive_grouped_sample_and_price(stream, len(gi.groups), p)
    return (m.total_weight,)


def sample_with_groups_trial(gi: GroupedInstance, p: float, seed: int) -> tuple[float, float, float]:
    stream = ArrivalStream(gi.group_payloads, seed)
    res = sample_with_groups(stream, len(gi.groups), p)
    return res.m1.total_weight, res.m2.total_weight, res.m3.total_weight


def graphic_trial(g: UndirectedGraph, seed: int) -> tuple[float]:
    stream = ArrivalStream(g.edge_payloads, seed)
    f, _ = graphic_matroid_secretary(stream, g.vertex_count, len(g.edges))
    return (f.total_weight,)


def classical_trial(weights: Sequence[float], seed: int) -> tuple[float, float]:
    """(weight taken, 1 if the heaviest element was taken)."""
    stream = ArrivalStream(weights, seed)
    chosen = run_classical_secretary(stream, len(weights))
    if chosen is None:
        return 0.0, 0.0
    return weights[chosen], float(weights[chosen] == max(weights))


def grouped_secretary_trial(groups: Sequence[Sequence[float]], seed: int) -> tuple[float, float]:
    ids = []
    flat = []
    for members in groups:
        ids.append(tuple((len(flat) + i, w) for i, w in enumerate(members)))
        flat.extend(members)
    stream = ArrivalStream(ids, seed)
    chosen = run_grouped_secretary(stream, len(groups))
    if chosen is None:
        return 0.0, 0.0
    return flat[chosen], float(flat[chosen] == max(flat))


# ---------------------------------------------------------------------------
# Algorithm registry


def _as_hvm(instance) -> HvmHypergraph:
    if isinstance(instance, HvmHypergraph):
        return instance
    if isinstance(instance, HemHypergraph):
        return reduce_hem_to_hvm(instance)
    if isinstance(instance, WeightedBipartiteGraph):
        return HvmHypergraph.from_bipartite(instance)
    raise HarnessError(f"{type(instance).__name__} is not a hypergraph instance")


def _need(instance, cls, what: str = ""):
    if not isinstance(instance, cls):
        raise HarnessError(f"algorithm needs a {what or cls.__name__} instance, got {type(instance).__name__}")
    return instance


def _need_groups(instance, mode: str | None = None) -> GroupedInstance:
    gi = _need(instance, GroupedInstance)
    if mode is not None and gi.grouping_mode != mode:
        raise HarnessError(f"algorithm needs {mode} grouping, got {gi.grouping_mode}")
    return gi


@dataclass(frozen=True)
class Algorithm:
    metrics: tuple[str, ...]
    build: Callable[[Any, dict], Callable[[int], Sequence[float]]]
    default_metric: str


ALGORITHMS: dict[str, Algorithm] = {
    "classical_secretary": Algorithm(
        ("revenue", "success"), lambda inst, prm: partial(classical_trial, tuple(inst)), "revenue"
    ),
    "grouped_secretary": Algorithm(
        ("revenue", "success"),
        lambda inst, prm: partial(grouped_secretary_trial, tuple(tuple(g) for g in inst)),
        "revenue",
    ),
    "bvm_sample_and_price": Algorithm(
        ("m1", "m2", "m3", "m"),
        lambda inst, prm: partial(bvm_trial, _need(inst, WeightedBipartiteGraph), prm.get("p", 0.5)),
        "m",
    ),
    "bvm_simulate": Algorithm(
        ("m1", "m2", "m3", "m"),
        lambda inst, prm: partial(bvm_trial, _need(inst, WeightedBipartiteGraph), prm.get("p", 0.5)),
        "m3",
    ),
    "hvm_sample_and_price": Algorithm(
        ("m1", "m2", "m3", "m"),
        lambda inst, prm: partial(hvm_trial, _as_hvm(inst), prm.get("d", _as_hvm(inst).d)),
        "m",
    ),
    "grouped_threshold_match": Algorithm(
        ("m",),
        lambda inst, prm: partial(
            grouped_threshold_trial, _need_groups(inst), prm.get("n_elements", inst.base.left_count)
        ),
        "m",
    ),
    "naive_grouped_sample_and_price": Algorithm(
        ("m",),
        lambda inst, prm: partial(naive_grouped_trial, _need_groups(inst), prm.get("p", 0.5)),
        "m",
    ),
    "sample_with_groups": Algorithm(
        ("m1", "m2", "m3"),
        lambda inst, prm: partial(sample_with_groups_trial, _need_groups(inst), prm.get("p", 0.5)),
        "m3",
    ),
    "graphic_matroid_secretary": Algorithm(
        ("m",), lambda inst, prm: partial(graphic_trial, _need(inst, UndirectedGraph)), "m"
    ),
}


def collect(
    algorithm_id: str,
    instance,
    params: dict | None,
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> dict[str, np.ndarray]:
    """Per-trial values of every metric the algorithm reports."""
    try:
        algo = ALGORITHMS[algorithm_id]
    except KeyError:
        raise HarnessError(f"unknown algorithm {algorithm_id!r}; known: {sorted(ALGORITHMS)}") from None
    values = run_trials(algo.build(instance, dict(params or {})), trials, master_seed, workers)
    return {name: values[:, i] for i, name in enumerate(algo.metrics)}


def estimate_revenue(
    algorithm_id: str,
    instance,
    params: dict | None = None,
    trials: int = 10_000,
    master_seed: int = 0,
    workers: int = 1,
) -> Estimate:
    """Monte Carlo estimate of one metric (``params['metric']``, else the algorithm's own output)."""
    params = dict(params or {})
    algo = ALGORITHMS.get(algorithm_id)
    metric = params.pop("metric", algo.default_metric if algo else None)
    series = collect(algorithm_id, instance, params, trials, master_seed, workers)
    if metric not in series:
        raise HarnessError(f"{algorithm_id} reports {sorted(series)}, not {metric!r}")
    return Estimate.from_values(series[metric])


# ---------------------------------------------------------------------------
# Bound suites


def _fmt(x: float) -> str:
    return repr(float(x))


def _bvm_checks(g, trials, seed, workers, p, slack):
    opt = optimal_bipartite(g).total_weight
    s = collect("bvm_sample_and_price", g, {"p": p}, trials, seed, workers)
    param = f"p={_fmt(p)}"
    mk = partial(BoundCheck, slack_sigmas=slack, param=param, opt=opt)
    return s, [
        mk("m1_ge_p_opt_over_2", p * opt / 2, Estimate.from_values(s["m1"]), algorithm="bvm_simulate"),
        mk("m2_ge_1mp_opt_over_2", (1 - p) * opt / 2, Estimate.from_values(s["m2"]), algorithm="bvm_simulate"),
        mk("m3_ge_p2_1mp_opt_over_2", p * p * (1 - p) / 2 * opt, Estimate.from_values(s["m3"]), algorithm="bvm_simulate"),
        mk("m_ge_p_1mp_opt_over_2", p * (1 - p) / 2 * opt, Estimate.from_values(s["m"]), algorithm="bvm_sample_and_price"),
    ]


def _hvm_checks(inst, trials, seed, workers, d, slack, allow_fallback):
    h = _as_hvm(inst)
    actual = max((len(rs) for _, rs, _ in h.edges), default=1)
    d = h.d if d is None else d
    if d < actual:
        raise HarnessError(f"d={d} is below the largest bundle size {actual}")
    if len(h.edges) <= HYPERGRAPH_EDGE_BUDGET:
        opt, source = optimal_hypergraph(h).total_weight, "exact"
    elif allow_fallback:
        opt, source = (d + 1) * greedy_hypergraph(h).total_weight, "greedy_scaled"
    else:
        raise OracleBudgetError(
            f"{len(h.edges)} hyperedges exceed the exact budget {HYPERGRAPH_EDGE_BUDGET}; allow the greedy fallback"
        )
    p = hvm_sample_probability(d)
    s = collect("hvm_sample_and_price", h, {"d": d}, trials, seed, workers)
    mk = partial(BoundCheck, slack_sigmas=slack, param=f"d={d}", opt=opt, opt_source=source)
    small = opt / (12 * d * (d + 1))
    return s, [
        mk("m1_ge_p_opt_over_d1", p * opt / (d + 1), Estimate.from_values(s["m1"]), algorithm="hvm_simulate"),
        mk("m2_ge_1mp_opt_over_d1", (1 - p) * opt / (d + 1), Estimate.from_values(s["m2"]), algorithm="hvm_simulate"),
        mk("m3_ge_opt_over_12d_d1", small, Estimate.from_values(s["m3"]), algorithm="hvm_simulate"),
        mk("m_ge_opt_over_12d_d1", small, Estimate.from_values(s["m"]), algorithm="hvm_sample_and_price"),
    ]


def grouped_log_lower(opt: float, n_elements: int) -> float:
    return opt / (64 * (ceil_log2(n_elements) + 1))


def _grouped_log_checks(inst, trials, seed, workers, slack):
    gi = _need_groups(inst, LEFT_VERTEX_GROUPS)
    n = gi.base.left_count
    opt = optimal_bipartite(gi.base).total_weight
    s = collect("grouped_threshold_match", gi, {"n_elements": n}, trials, seed, workers)
    return s, [
        BoundCheck(
            "m_ge_opt_over_64_log_n_plus_1", grouped_log_lower(opt, n), Estimate.from_values(s["m"]),
            slack, algorithm="grouped_threshold_match", param=f"n={n}", opt=opt,
        )
    ]


def _graphic_checks(inst, trials, seed, workers, slack):
    g = _need(inst, UndirectedGraph)
    opt = max_weight_forest(g).total_weight
    s = collect("graphic_matroid_secretary", g, {}, trials, seed, workers)
    return s, [
        BoundCheck(
            "forest_ge_opt_over_2e", opt / (2 * math.e), Estimate.from_values(s["m"]),
            slack, algorithm="graphic_matroid_secretary", opt=opt,
        )
    ]


def _conjecture_checks(inst, trials, seed, workers, p, slack):
    gi = _need_groups(inst, LEFT_VERTEX_GROUPS)
    opt = optimal_bipartite(gi.base).total_weight
    s = collect("sample_with_groups", gi, {"p": p}, trials, seed, workers)
    mk = partial(BoundCheck, slack_sigmas=slack, algorithm="sample_with_groups", param=f"p={_fmt(p)}", opt=opt)
    balance = s["m2"] - (1 - p) / p * s["m1"]
    return s, [
        mk("m1_ge_p_opt_over_2", p * opt / 2, Estimate.from_values(s["m1"])),
        mk("m2_minus_scaled_m1_eq_0", 0.0, Estimate.from_values(balance), kind="equal"),
        mk("m2_report", 0.0, Estimate.from_values(s["m2"]), kind="info"),
        mk("m3_report", 0.0, Estimate.from_values(s["m3"]), kind="info"),
    ]


def naive_exact_expectation(gi: GroupedInstance, p: float) -> float:
    """Exact expected revenue of naive grouped sample-and-price, by enumerating arrival orders and sample sizes."""
    g = len(gi.groups)
    if g > 8:
        raise OracleBudgetError("exact enumeration limited to 8 groups")
    total = 0.0
    orders = list(permutations(range(g)))
    for k in range(g + 1):
        pk = math.comb(g, k) * p**k * (1 - p) ** (g - k)
        for order in orders:
            stream = ArrivalStream(gi.group_payloads, 0, order=order)
            m, _ = naive_grouped_sample_and_price(stream, g, p, sample_size=k)
            total += pk * m.total_weight / len(orders)
    return total


def _counterexample_checks(inst, trials, seed, workers, p, slack):
    gi = _need_groups(inst, EDGE_GROUPS)
    opt = optimal_bipartite(gi.base).total_weight
    s = collect("naive_grouped_sample_and_price", gi, {"p": p}, trials, seed, workers)
    mk = partial(BoundCheck, slack_sigmas=slack, algorithm="naive_grouped_sample_and_price", param=f"p={_fmt(p)}", opt=opt)
    est = Estimate.from_values(s["m"])
    checks = [mk("m_le_opt_over_2", opt / 2, est, kind="upper")]
    if len(gi.groups) <= 8:
        checks.append(mk("m_eq_exact_expectation", naive_exact_expectation(gi, p), est, kind="equal"))
    return s, checks


def check_bounds(
    instance,
    suite: str,
    trials: int = 10_000,
    master_seed: int = 0,
    *,
    p: float = 0.5,
    d: int | None = None,
    slack_sigmas: float = SLACK_SIGMAS,
    allow_fallback: bool = True,
    flaky_guard: bool = True,
    workers: int = 1,
    series: dict[str, np.ndarray] | None = None,
) -> list[BoundCheck]:
    """One BoundCheck per bound that applies to ``suite`` on this instance.

    With ``flaky_guard``, a failing check is re-run with ten times the trials
    (same master seed) and the re-run result is reported instead.  Pass a dict
    as ``series`` to receive the per-trial metric values of the first run.
    """

    def run(n: int) -> tuple[dict[str, np.ndarray], list[BoundCheck]]:
        if suite == "bvm":
            return _bvm_checks(_need(instance, WeightedBipartiteGraph), n, master_seed, workers, p, slack_sigmas)
        if suite == "hvm":
            return _hvm_checks(instance, n, master_seed, workers, d, slack_sigmas, allow_fallback)
        if suite == "grouped_log":
            return _grouped_log_checks(instance, n, master_seed, workers, slack_sigmas)
        if suite == "graphic":
            return _graphic_checks(instance, n, master_seed, workers, slack_sigmas)
        if suite == "conjecture":
            return _conjecture_checks(instance, n, master_seed, workers, p, slack_sigmas)
        if suite == "counterexample":
            return _counterexample_checks(instance, n, master_seed, workers, p, slack_sigmas)
        raise HarnessError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")

    if suite in ("bvm", "conjecture", "counterexample") and not 0 < p < 1:
        raise HarnessError(f"p must lie in (0, 1), got {p}")
    values, checks = run(trials)
    if series is not None:
        series.update(values)
    if flaky_guard and any(c.verdict == "fail" for c in checks):
        _, rerun = run(trials * FLAKY_GUARD_FACTOR)
        checks = [again if first.verdict == "fail" else first for first, again in zip(checks, rerun)]
    return checks


RESULT_COLUMNS = (
    "suite", "instance_id", "algorithm", "param", "bound_name", "theoretical_lower",
    "mean", "std_error", "trials", "verdict", "opt_source", "master_seed",
)


def result_rows(suite: str, instance_id: str, checks: Sequence[BoundCheck], master_seed: int) -> list[dict]:
    return [
        {
            "suite": suite,
            "instance_id": instance_id,
            "algorithm": c.algorithm,
            "param": c.param,
            "bound_name": c.bound_name,
            "theoretical_lower": _fmt(c.theoretical_lower),
            "mean": _fmt(c.estimate.mean),
            "std_error": _fmt(c.estimate.std_error),
            "trials": c.estimate.trials,
            "verdict": c.verdict,
            "opt_source": c.opt_source,
            "master_seed": master_seed,
        }
        for c in checks
    ]


def write_results(rows: Sequence[dict], out: io.TextIOBase) -> None:
    writer = csv.DictWriter(out, fieldnames=RESULT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


# ---------------------------------------------------------------------------
# Degree/revenue probe for the pruning analysis


@dataclass
class DegreeRevenueStats:
    """Right-vertex degree distribution in M2 and revenues, pooled over right vertices and trials.

    ``degree_share[t, i]`` is the fraction of right vertices with M2-degree i in
    trial t.  ``rev2``/``rev3`` are per-trial totals: M2 revenue, and the revenue
    kept when each right vertex keeps only its first-arriving M2 edge.
    """

    p: float
    degree_share: np.ndarray
    revenue_by_degree: np.ndarray
    count_by_degree: np.ndarray
    rev2: np.ndarray
    rev3: np.ndarray

    @property
    def trials(self) -> int:
        return self.degree_share.shape[0]

    @property
    def frequencies(self) -> np.ndarray:
        """Estimated P_i for i = 0, 1, 2, ..."""
        return self.degree_share.mean(axis=0)

    @property
    def mean_revenue_by_degree(self) -> np.ndarray:
        """Estimated conditional M2 revenue of a right vertex given its degree i (nan when unseen)."""
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.count_by_degree > 0, self.revenue_by_degree / np.maximum(self.count_by_degree, 1), np.nan)

    @property
    def rev2_estimate(self) -> Estimate:
        return Estimate.from_values(self.rev2)

    @property
    def rev3_estimate(self) -> Estimate:
        return Estimate.from_values(self.rev3)

    def decay_checks(self, slack_sigmas: float = SLACK_SIGMAS, min_previous: float = 0.01) -> list[BoundCheck]:
        """P_i <= (1-p) P_{i-1} + slack*SE for every i >= 2 whose P_{i-1} exceeds ``min_previous``."""
        freq = self.frequencies
        out = []
        for i in range(2, len(freq)):
            if freq[i - 1] <= min_previous:
                continue
            diff = self.degree_share[:, i] - (1 - self.p) * self.degree_share[:, i - 1]
            out.append(BoundCheck(f"P{i}_le_1mp_P{i - 1}", 0.0, Estimate.from_values(diff), slack_sigmas, kind="upper"))
        return out

    def revenue_check(self, slack_sigmas: float = SLACK_SIGMAS) -> BoundCheck:
        """Rev3 >= p * Rev2 - slack*SE, with the SE of the paired difference."""
        return BoundCheck(
            "rev3_ge_p_rev2", 0.0, Estimate.from_values(self.rev3 - self.p * self.rev2), slack_sigmas
        )


def _probe_trial(g: WeightedBipartiteGraph, p: float, seed: int) -> np.ndarray:
    stream = ArrivalStream(g.left_payloads, seed)
    m, log = bvm_sample_and_price(stream, g.left_count, g.right_count, p)
    heads = {d.unit for d in log.entries[: log.observed]}
    sim = bvm_simulate(g, p, heads=heads)
    degree = np.zeros(g.right_count, dtype=int)
    revenue = np.zeros(g.right_count)
    for eid in sim.m2.edge_indices:
        _, r, w = g.edges[eid]
        degree[r] += 1
        revenue[r] += w
    return degree, revenue, m.total_weight


def degree_revenue_probe(
    g: WeightedBipartiteGraph, p: float = 0.5, trials: int = 100_000, master_seed: int = 0
) -> DegreeRevenueStats:
    """Tabulate M2 degrees and revenues of right vertices over coupled Simulate / sample-and-price runs.

    Sample-and-price keeps, at each right vertex, exactly the M2 edge whose left
    vertex arrives first, so its revenue is the first-arrival pruning of M2.
    """
    _need(g, WeightedBipartiteGraph)
    degrees = np.zeros((trials, g.right_count), dtype=int)
    revenues = np.zeros((trials, g.right_count))
    rev3 = np.zeros(trials)
    for t in range(trials):
        degrees[t], revenues[t], rev3[t] = _probe_trial(g, p, trial_seed(master_seed, t))
    top = int(degrees.max(initial=0))
    share = np.stack([(degrees == i).mean(axis=1) for i in range(top + 1)], axis=1)
    rev_by_deg = np.array([revenues[degrees == i].sum() for i in range(top + 1)])
    count_by_deg = np.array([(degrees == i).sum() for i in range(top + 1)])
    return DegreeRevenueStats(p, share, rev_by_deg, count_by_deg, revenues.sum(axis=1), rev3)


# ---------------------------------------------------------------------------
# Grouped experiments


@dataclass(frozen=True)
class ConjectureRow:
    instance_id: str
    m1: Estimate
    m2: Estimate
    m3: Estimate
    balance: Estimate  # per-trial M2 - (1-p)/p * M1

    @property
    def ratio(self) -> float:
        return self.m3.mean / self.m2.mean if self.m2.mean > 0 else math.nan


@dataclass
class ConjectureTable:
    p: float
    master_seed: int
    rows: list[ConjectureRow] = field(default_factory=list)

    @property
    def min_ratio(self) -> float:
        ratios = [r.ratio for r in self.rows if not math.isnan(r.ratio)]
        return min(ratios) if ratios else math.nan

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance_id", "p", "trials", "mean_m1", "se_m1", "mean_m2", "se_m2",
                    "mean_m3", "se_m3", "ratio_m3_over_m2", "master_seed"])
        for r in self.rows:
            w.writerow([r.instance_id, _fmt(self.p), r.m1.trials, _fmt(r.m1.mean), _fmt(r.m1.std_error),
                        _fmt(r.m2.mean), _fmt(r.m2.std_error), _fmt(r.m3.mean), _fmt(r.m3.std_error),
                        _fmt(r.ratio), self.master_seed])
        w.writerow(["min_ratio", _fmt(self.p), "", "", "", "", "", "", "", _fmt(self.min_ratio), self.master_seed])
        return buf.getvalue()


def conjecture_probe(
    instances: Sequence[GroupedInstance],
    p: float = 0.5,
    trials: int = 10_000,
    master_seed: int = 0,
    ids: Sequence[str] | None = None,
    workers: int = 1,
) -> ConjectureTable:
    """Expected M1, M2, M3 of the grouped sampling construction per instance; reports, never judges, M3/M2."""
    ids = list(ids) if ids is not None else [str(i) for i in range(len(instances))]
    table = ConjectureTable(p, master_seed)
    for i, (iid, gi) in enumerate(zip(ids, instances)):
        _need_groups(gi, LEFT_VERTEX_GROUPS)
        s = collect("sample_with_groups", gi, {"p": p}, trials, derive_seed(master_seed, i), workers)
        table.rows.append(
            ConjectureRow(
                iid,
                Estimate.from_values(s["m1"]),
                Estimate.from_values(s["m2"]),
                Estimate.from_values(s["m3"]),
                Estimate.from_values(s["m2"] - (1 - p) / p * s["m1"]),
            )
        )
    return table


def counterexample_experiment(
    n: int, epsilon: float, trials: int = 10_000, master_seed: int = 0, p: float = 0.5
) -> tuple[Estimate, float]:
    """Revenue of naive grouped sample-and-price on the two-group construction, and the optimum."""
    gi = gen_groups_counterexample(n, epsilon)
    est = estimate_revenue("naive_grouped_sample_and_price", gi, {"p": p}, trials, master_seed)
    opt = sum(w for _, _, w in gi.base.edges[:n])
    return est, opt

