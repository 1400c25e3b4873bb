import itertools
import math
import random
from collections import Counter
from collections.abc import Sequence
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seclab.instances import (
    HvmHypergraph,
    UndirectedGraph,
    WeightedBipartiteGraph,
    gen_figure2,
    gen_groups_counterexample,
    gen_random_bipartite,
    gen_random_graph,
    gen_random_grouped,
    gen_random_hvm,
    singleton_groups,
    uniform,
)
from seclab.online import (
    ArrivalStream,
    StreamError,
    binomial_inverse_cdf,
    bvm_sample_and_price,
    bvm_simulate,
    classical_cutoff,
    graphic_matroid_secretary,
    grouped_threshold_match,
    hvm_sample_and_price,
    hvm_simulate,
    naive_grouped_sample_and_price,
    run_classical_secretary,
    run_grouped_secretary,
    sample_with_groups,
    threshold_exponents,
)
from seclab.oracles import greedy_hypergraph, is_forest

from .bruteforce import secretary_closed_form

seeds = st.integers(0, 2**63 - 1)
U01 = uniform(0, 1)


def greedy_ids_on(g: WeightedBipartiteGraph, lefts) -> set[int]:
    keep = set(lefts)
    used_l, used_r, out = set(), set(), set()
    for eid, l, r, _ in g.sorted_edges:
        if l in keep and l not in used_l and r not in used_r:
            used_l.add(l)
            used_r.add(r)
            out.add(eid)
    return out


# --- arrival stream -------------------------------------------------------------


def test_stream_order_is_seeded_and_uniform():
    assert list(ArrivalStream(range(5), seed=4)._order) == list(ArrivalStream(range(5), seed=4)._order)
    counts = Counter(tuple(ArrivalStream(range(3), seed=s)._order) for s in range(6000))
    assert len(counts) == 6
    # each order has probability 1/6; binomial sd is about 29
    assert all(abs(c - 1000) < 5 * 29 for c in counts.values())


def test_stream_logs_every_unit_once_in_order():
    stream = ArrivalStream(["a", "b", "c"], order=[2, 0, 1])
    seen = []
    for idx, uid, payload in stream:
        seen.append((idx, uid, payload))
        if uid == 0:
            stream.accept([7])
    assert seen == [(0, 2, "c"), (1, 0, "a"), (2, 1, "b")]
    assert stream.log.as_rows() == [(0, 2, "reject", ()), (1, 0, "accept", (7,)), (2, 1, "reject", ())]


def test_stream_refuses_double_decisions_and_reuse():
    stream = ArrivalStream([1, 2])
    with pytest.raises(StreamError):
        stream.accept([0])
    it = iter(stream)
    next(it)
    stream.reject()
    with pytest.raises(StreamError):
        stream.accept([0])
    list(it)
    with pytest.raises(StreamError):
        list(stream)


def test_stream_rejects_bad_order():
    with pytest.raises(ValueError):
        ArrivalStream([1, 2, 3], order=[0, 0, 1])


def test_binomial_inverse_cdf_edges_and_law():
    assert binomial_inverse_cdf(0, 0.5, 0.3) == 0
    assert binomial_inverse_cdf(5, 0.0, 0.9) == 0
    assert binomial_inverse_cdf(5, 1.0, 0.1) == 5
    assert binomial_inverse_cdf(1, 0.5, 0.49) == 0 and binomial_inverse_cdf(1, 0.5, 0.5) == 1
    rng = random.Random(1)
    draws = [binomial_inverse_cdf(10, 0.3, rng.random()) for _ in range(20000)]
    assert abs(sum(draws) / len(draws) - 3.0) < 5 * math.sqrt(2.1 / 20000)


# --- no peeking and irrevocability -----------------------------------------------------


class PoisonedPayloads(Sequence):
    """Payload table that only answers for the unit currently arriving; anything else is a peek."""

    def __init__(self, payloads, order):
        self.payloads = payloads
        self.order = list(order)
        self.reads = 0

    def __len__(self):
        return len(self.payloads)

    def __getitem__(self, uid):
        if self.reads >= len(self.order) or uid != self.order[self.reads]:
            raise AssertionError(f"peeked at unit {uid} out of arrival order")
        self.reads += 1
        return self.payloads[uid]


def _algorithm_cases():
    g = gen_random_bipartite(7, 5, 0.6, U01, seed=1)
    h = gen_random_hvm(6, 5, 2, 3, U01, seed=2)
    gi = gen_random_grouped(8, 5, 0.6, 4, U01, seed=3)
    ce = gen_groups_counterexample(4, 1e-3)
    graph = gen_random_graph(6, 0.6, U01, seed=4)
    weights = [0.3, 0.9, 0.1, 0.5, 0.7]
    groups = [((0, 0.3), (1, 0.9)), ((2, 0.1),), ((3, 0.5), (4, 0.7))]
    return [
        ("classical", weights, lambda s: (run_classical_secretary(s, 5), s.log), None),
        ("grouped_secretary", groups, lambda s: (run_grouped_secretary(s, 3), s.log), None),
        ("bvm", g.left_payloads, lambda s: bvm_sample_and_price(s, 7, 5, 0.5), g),
        ("hvm", h.left_payloads, lambda s: hvm_sample_and_price(s, 6, 5, 2), h),
        ("threshold", gi.group_payloads, lambda s: grouped_threshold_match(s, 4, 8), gi.base),
        ("naive", ce.group_payloads, lambda s: naive_grouped_sample_and_price(s, 2, 0.5), ce.base),
        ("with_groups", gi.group_payloads, lambda s: (sample_with_groups(s, 4, 0.5), s.log), None),
        ("graphic", graph.edge_payloads, lambda s: graphic_matroid_secretary(s, 6, len(graph.edges)), graph),
    ]


CASES = _algorithm_cases()


@pytest.mark.parametrize("name,payloads,run,inst", CASES, ids=[c[0] for c in CASES])
def test_no_algorithm_reads_future_units(name, payloads, run, inst):
    for seed in range(50):
        order = list(range(len(payloads)))
        random.Random(seed).shuffle(order)
        poisoned = PoisonedPayloads(payloads, order)
        stream = ArrivalStream(poisoned, seed=seed, order=order)
        run(stream)
        assert poisoned.reads == len(order)


@pytest.mark.parametrize("name,payloads,run,inst", CASES, ids=[c[0] for c in CASES])
def test_decisions_are_irrevocable_and_match_the_output(name, payloads, run, inst):
    for seed in range(200):
        stream = ArrivalStream(payloads, seed=seed)
        result, log = run(stream)
        assert [d.index for d in log] == list(range(len(payloads)))
        assert sorted(d.unit for d in log) == list(range(len(payloads)))
        assert [d.unit for d in log] == stream._order
        assert all(d.index >= log.observed for d in log if d.accepted)
        if inst is not None:
            assert set(result.edge_indices) == set(log.accepted_edges())
            assert result.total_weight == pytest.approx(sum(inst.edges[i][-1] for i in result.edge_indices))


@pytest.mark.parametrize("name,payloads,run,inst", CASES, ids=[c[0] for c in CASES])
def test_same_seed_same_log(name, payloads, run, inst):
    for seed in (0, 1, 2**40 + 3):
        a = run(ArrivalStream(payloads, seed=seed))[1]
        b = run(ArrivalStream(payloads, seed=seed))[1]
        assert a == b


# --- classical and grouped secretary ---------------------------------------------------------


def test_classical_cutoffs():
    assert [classical_cutoff(n) for n in range(1, 9)] == [0, 0, 1, 1, 1, 2, 2, 2]


def test_classical_single_element_always_taken():
    for seed in range(20):
        assert run_classical_secretary(ArrivalStream([4.2], seed), 1) == 0


@pytest.mark.parametrize("n", range(1, 8))
def test_classical_exhaustive_success_matches_closed_form(n):
    weights = [float(i) for i in range(n)]
    wins = sum(
        run_classical_secretary(ArrivalStream(weights, order=perm), n) == n - 1
        for perm in itertools.permutations(range(n))
    )
    assert Fraction(wins, math.factorial(n)) == secretary_closed_form(n, classical_cutoff(n))
    if n == 3:
        assert wins / 6 == 0.5


def test_classical_accepts_at_most_once_at_its_arrival():
    weights = [0.2, 0.4, 0.1, 0.9, 0.3, 0.8]
    for seed in range(100):
        stream = ArrivalStream(weights, seed)
        chosen = run_classical_secretary(stream, 6)
        accepted = [d for d in stream.log if d.accepted]
        assert len(accepted) <= 1
        if chosen is not None:
            assert accepted[0].unit == chosen and accepted[0].accepted == (chosen,)


def test_grouped_secretary_single_group_takes_its_max():
    groups = [((0, 0.4), (1, 0.9), (2, 0.1))]
    assert run_grouped_secretary(ArrivalStream(groups, 5), 1) == 1


def test_grouped_secretary_with_singletons_matches_classical():
    weights = [0.3, 0.1, 0.8, 0.5, 0.9, 0.2, 0.6]
    groups = [((i, w),) for i, w in enumerate(weights)]
    for seed in range(300):
        a = ArrivalStream(weights, seed)
        b = ArrivalStream(groups, seed)
        assert run_classical_secretary(a, 7) == run_grouped_secretary(b, 7)
        assert a.log == b.log


def test_grouped_secretary_three_groups_wins_at_least_half():
    groups = [((0, 0.2), (1, 0.7)), ((2, 0.9),), ((3, 0.1), (4, 0.4), (5, 0.3))]
    wins = sum(run_grouped_secretary(ArrivalStream(groups, order=o), 3) == 2 for o in itertools.permutations(range(3)))
    assert wins / 6 >= 0.5


# --- bipartite ---------------------------------------------------------------------


def test_simulate_single_edge():
    g = WeightedBipartiteGraph(1, 1, ((0, 0, 2.0),))
    heads = bvm_simulate(g, 0.5, heads={0})
    assert set(heads.m1) == {0} and len(heads.m2) == 0 and len(heads.m3) == 0
    tails = bvm_simulate(g, 0.5, heads=set())
    assert len(tails.m1) == 0 and set(tails.m2) == {0} and set(tails.m3) == {0}
    assert tails.coin_record == {0: False}


def test_simulate_two_tails_into_one_right_vertex():
    g = WeightedBipartiteGraph(2, 1, ((0, 0, 3.0), (1, 0, 2.0)))
    res = bvm_simulate(g, 0.5, heads=set())
    assert set(res.m2) == {0, 1} and len(res.m3) == 0


def test_simulate_seeded_coins_are_reproducible():
    g = gen_random_bipartite(10, 10, 0.5, U01, seed=3)
    assert bvm_simulate(g, 0.4, seed=9) == bvm_simulate(g, 0.4, seed=9)


def test_sample_and_price_single_vertex():
    g = WeightedBipartiteGraph(1, 3, ((0, 0, 1.0), (0, 1, 3.0), (0, 2, 2.0)))
    m, _ = bvm_sample_and_price(ArrivalStream(g.left_payloads, 0), 1, 3, sample_size=1)
    assert len(m) == 0
    m, _ = bvm_sample_and_price(ArrivalStream(g.left_payloads, 0), 1, 3, sample_size=0)
    assert set(m) == {1} and m.total_weight == 3.0


def test_sample_and_price_figure2_forced_sample():
    g = gen_figure2().base
    stream = ArrivalStream(g.left_payloads, order=[0, 1, 2])
    m, log = bvm_sample_and_price(stream, 3, 2, sample_size=2)
    assert len(m) == 0
    assert log.observed == 2
    # C's only edge weighs 1, below Y's price 2, so C proposes nothing
    assert log.entries[2].unit == 2 and log.entries[2].proposed == () and not log.entries[2].accepted


def _random_pair(seed):
    rng = random.Random(seed)
    g = gen_random_bipartite(rng.randint(1, 9), rng.randint(1, 9), rng.uniform(0.2, 0.9), U01, seed)
    order = list(range(g.left_count))
    rng.shuffle(order)
    k = rng.randint(0, g.left_count)
    return g, order, k


def test_coupling_over_1000_instances():
    for seed in range(1000):
        g, order, k = _random_pair(seed)
        heads = set(order[:k])
        sim = bvm_simulate(g, 0.5, heads=heads)
        # M1 is the greedy matching on the heads subgraph
        assert set(sim.m1) == greedy_ids_on(g, heads)
        m, log = bvm_sample_and_price(ArrivalStream(g.left_payloads, order=order), g.left_count, g.right_count, sample_size=k)
        m2_edge = {g.edges[e][0]: e for e in sim.m2}
        for d in log.entries[k:]:
            assert d.proposed == ((m2_edge[d.unit],) if d.unit in m2_edge else ())
        assert m.total_weight >= sim.m3.total_weight
        assert set(sim.m3) <= set(m)


@settings(max_examples=300, deadline=None)
@given(seeds, st.floats(0.05, 0.95))
def test_simulate_structure(seed, p):
    g = gen_random_bipartite(8, 6, 0.5, U01, seed % 2**32)
    res = bvm_simulate(g, p, seed)
    left = lambda ids: [g.edges[i][0] for i in ids]
    right = lambda ids: [g.edges[i][1] for i in ids]
    assert len(set(left(res.m1))) == len(res.m1) and len(set(right(res.m1))) == len(res.m1)
    assert set(res.m3) <= set(res.m2)
    assert not set(left(res.m1)) & set(left(res.m2))
    deg = Counter(right(res.m2))
    assert {e for e in res.m2 if deg[g.edges[e][1]] == 1} == set(res.m3)
    assert set(res.coin_record) == set(left(res.m1)) | set(left(res.m2))


# --- hypergraph -----------------------------------------------------------------


def test_hvm_simulate_hand_traces():
    single = HvmHypergraph(1, 2, 2, ((0, {0, 1}, 1.0),))
    assert set(hvm_simulate(single, 0.5, heads=set()).m3) == {0}
    clash = HvmHypergraph(2, 3, 2, ((0, {0, 1}, 3.0), (1, {1, 2}, 2.0)))
    res = hvm_simulate(clash, 0.5, heads=set())
    assert set(res.m2) == {0, 1} and len(res.m3) == 0
    apart = HvmHypergraph(2, 3, 1, ((0, {0}, 3.0), (1, {2}, 2.0)))
    assert set(hvm_simulate(apart, 0.5, heads=set()).m3) == {0, 1}


def test_hvm_single_vertex_unsampled_takes_max():
    h = HvmHypergraph(1, 3, 2, ((0, {0, 1}, 1.0), (0, {2}, 5.0)))
    m, _ = hvm_sample_and_price(ArrivalStream(h.left_payloads, 0), 1, 3, 2, sample_size=0)
    assert set(m) == {1}


def test_hvm_with_d1_reproduces_bipartite_decisions():
    for seed in range(300):
        g = gen_random_bipartite(1 + seed % 9, 1 + seed % 7, 0.5, U01, seed)
        h = HvmHypergraph.from_bipartite(g)
        for trial in range(3):
            s = seed * 10 + trial
            mb, lb = bvm_sample_and_price(ArrivalStream(g.left_payloads, s), g.left_count, g.right_count, 0.5)
            mh, lh = hvm_sample_and_price(ArrivalStream(h.left_payloads, s), h.left_count, h.right_count, 1)
            assert lb == lh and mb == mh


def test_hvm_outputs_disjoint_and_m1_is_greedy_on_heads():
    for seed in range(300):
        rng = random.Random(seed)
        h = gen_random_hvm(rng.randint(1, 8), rng.randint(2, 8), rng.randint(1, 3), 3, U01, seed)
        m, log = hvm_sample_and_price(ArrivalStream(h.left_payloads, seed), h.left_count, h.right_count, h.d)
        rs = [r for e in m for r in h.edges[e][1]]
        ls = [h.edges[e][0] for e in m]
        assert len(rs) == len(set(rs)) and len(ls) == len(set(ls))
        heads = {d.unit for d in log.entries[: log.observed]}
        sim = hvm_simulate(h, 0.5, heads=heads)
        sub = HvmHypergraph(h.left_count, h.right_count, h.d, tuple(e for e in h.edges if e[0] in heads))
        assert sim.m1.total_weight == greedy_hypergraph(sub).total_weight
        m2_rights = Counter(r for e in sim.m2 for r in h.edges[e][1])
        assert {e for e in sim.m2 if all(m2_rights[r] == 1 for r in h.edges[e][1])} == set(sim.m3)
        assert set(sim.m3) <= set(m)


# --- grouped ------------------------------------------------------------------------


def test_threshold_exponent_range():
    assert list(threshold_exponents(4)) == [0, 1, 2, 3]
    assert list(threshold_exponents(3)) == [0, 1, 2, 3]
    assert list(threshold_exponents(1)) == [0, 1]
    gi = gen_figure2()
    js = {grouped_threshold_match(ArrivalStream(gi.group_payloads, s), 2, 4)[1].params["j"] for s in range(400)}
    assert js == {0, 1, 2, 3}


def test_threshold_single_group_takes_nothing():
    base = WeightedBipartiteGraph(2, 2, ((0, 0, 1.0), (1, 1, 2.0)))
    gi = singleton_groups(base)
    one = type(gi)(base, gi.grouping_mode, ((0, 1),))
    m, log = grouped_threshold_match(ArrivalStream(one.group_payloads, 3), 1, 2)
    assert len(m) == 0 and log.observed == 1


def test_threshold_accepts_only_above_threshold_as_a_matching():
    for seed in range(300):
        gi = gen_random_grouped(8, 6, 0.5, 5, U01, seed)
        stream = ArrivalStream(gi.group_payloads, seed)
        m, log = grouped_threshold_match(stream, 5, 8)
        observed = [gi.group_payloads[d.unit] for d in log.entries[:3]]
        w = max((row[3] for rows in observed for row in rows), default=0.0)
        assert log.params.get("threshold", w / 2 ** log.params["j"]) == w / 2 ** log.params["j"]
        ls = [gi.base.edges[e][0] for e in m]
        rs = [gi.base.edges[e][1] for e in m]
        assert len(set(ls)) == len(ls) and len(set(rs)) == len(rs)
        assert all(gi.base.edges[e][2] >= w / 2 ** log.params["j"] for e in m)


def _counterexample_case(first, k, n=50, eps=1e-5):
    gi = gen_groups_counterexample(n, eps)
    order = [first, 1 - first]
    return naive_grouped_sample_and_price(ArrivalStream(gi.group_payloads, order=order), 2, sample_size=k)


def test_naive_pricing_counterexample_cases():
    n, eps = 50, 1e-5
    # E1 sampled, E2 not: every shifted edge loses to its right endpoint
    m, _ = _counterexample_case(0, 1)
    assert len(m) == 0
    # E2 sampled, E1 not: only (l_n, r_n) survives
    m, _ = _counterexample_case(1, 1)
    assert set(m) == {n - 1}
    assert m.total_weight == 1 + 2 * n * eps
    for first in (0, 1):
        assert len(_counterexample_case(first, 2)[0]) == 0


def test_sample_with_groups_figure2_trace():
    gi = gen_figure2()
    # group 1 is {B}, group 0 is {A, C}
    res = sample_with_groups(ArrivalStream(gi.group_payloads, order=[1, 0]), 2, sample_size=1)
    assert set(res.m1) == {1} and res.m1.total_weight == 3.0
    assert set(res.m2) == {0} and set(res.m3) == {0}
    assert res.coin_record == {1: True, 0: False}


def test_sample_with_groups_all_sampled():
    gi = gen_figure2()
    res = sample_with_groups(ArrivalStream(gi.group_payloads, 0), 2, sample_size=2)
    assert len(res.m2) == 0 and len(res.m3) == 0


def test_singleton_groups_reproduce_simulate():
    for seed in range(300):
        g, order, k = _random_pair(seed)
        gi = singleton_groups(g)
        res = sample_with_groups(ArrivalStream(gi.group_payloads, order=order), g.left_count, sample_size=k)
        sim = bvm_simulate(g, 0.5, heads=set(order[:k]))
        assert (res.m1, res.m2, res.m3) == (sim.m1, sim.m2, sim.m3)


# --- graphic ---------------------------------------------------------------------


def test_graphic_single_edge_always_taken():
    g = UndirectedGraph(2, ((0, 1, 3.0),))
    for seed in range(20):
        f, _ = graphic_matroid_secretary(ArrivalStream(g.edge_payloads, seed), 2, 1)
        assert set(f) == {0}


def test_graphic_outputs_are_forests_with_one_out_edge_per_vertex():
    for seed in range(500):
        g = gen_random_graph(2 + seed % 9, 0.6, U01, seed)
        f, log = graphic_matroid_secretary(ArrivalStream(g.edge_payloads, seed), g.vertex_count, len(g.edges))
        assert is_forest(g.vertex_count, [g.edges[e][:2] for e in f])
        o = log.params["orientation"]
        tails = [max(g.edges[e][:2]) if o == 0 else min(g.edges[e][:2]) for e in f]
        assert len(tails) == len(set(tails))
        assert log.observed == math.floor(len(g.edges) / math.e)


def test_graphic_coin_is_fair():
    g = UndirectedGraph(3, ((0, 1, 1.0), (1, 2, 2.0)))
    coins = [graphic_matroid_secretary(ArrivalStream(g.edge_payloads, s), 3, 2)[1].params["orientation"] for s in range(4000)]
    assert abs(sum(coins) - 2000) < 5 * math.sqrt(1000)
