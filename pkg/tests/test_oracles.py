import networkx as nx
import pytest

from conftest import random_profile
from fairstream.core import ValuationProfile, count_adjustments
from fairstream.generators import gen_binary_two_agent, gen_identical_ones, gen_nonidentical_propa, gen_remark_132
from fairstream.oracles import (BudgetExceeded, brute_ef1_noncontiguous, certify_forced_block, count_contiguous,
                                enumerate_contiguous, min_adjustment_schedule, valid_allocations)


@pytest.mark.parametrize("n,t,permute,expected", [(2, 3, False, 4), (3, 2, False, 6), (1, 5, False, 1),
                                                  (2, 3, True, 8), (3, 0, True, 6)])
def test_enumeration_counts(n, t, permute, expected):
    assert count_contiguous(n, t, permute) == expected
    assert len(list(enumerate_contiguous(n, t, permute=permute))) == expected


def test_enumeration_is_distinct_and_sorted():
    cuts = [ca.cuts for ca in enumerate_contiguous(3, 4)]
    assert cuts == sorted(set(cuts))


def test_budget_refusal():
    with pytest.raises(BudgetExceeded) as info:
        list(enumerate_contiguous(4, 30, budget=100))
    assert info.value.count == count_contiguous(4, 30)
    with pytest.raises(BudgetExceeded):
        brute_ef1_noncontiguous(ValuationProfile(((1,) * 9,) * 3))


class TestBruteEf1:
    def test_single_item_every_assignment(self):
        V = ValuationProfile(((1,), (1,)))
        assert brute_ef1_noncontiguous(V) == [(1,), (2,)]

    def test_two_shared_goods_are_split(self):
        V = ValuationProfile(((1, 1), (1, 1)))
        assert brute_ef1_noncontiguous(V) == [(1, 2), (2, 1)]

    def test_goods_nobody_wants(self):
        V = ValuationProfile(((0, 0), (0, 0)))
        assert brute_ef1_noncontiguous(V) == [(1, 1), (1, 2), (2, 1), (2, 2)]

    def test_remark_excludes_big_to_one_agent(self):
        owners = brute_ef1_noncontiguous(gen_remark_132())
        assert (1, 2, 2) not in owners
        assert (2, 1, 1) not in owners
        assert (1, 2, 1) in owners

    def test_empty(self):
        assert brute_ef1_noncontiguous(ValuationProfile(((), ()))) == [()]


class TestCertificates:
    def test_identical_ones_second_round(self):
        cert = certify_forced_block(gen_identical_ones(2, 2), "propa", 2, item=1)
        assert cert.forced == 1

    def test_first_round_is_free(self):
        cert = certify_forced_block(gen_identical_ones(2, 1), "propa", 1, item=1)
        assert cert.owners == {1, 2} and cert.forced is None

    def test_binary_alternation(self):
        V = gen_binary_two_agent(4)
        assert certify_forced_block(V, "ef1", 12).forced == 2
        cert = certify_forced_block(V, "ef1", 16, prefix=4)
        assert cert.forced == 1 and cert.prefix_forced == 1

    def test_propa_does_not_force_after_new_period(self):
        # measured fact: with the global maximum, round nk+n leaves the prefix owner open
        for n, owners in ((2, {1, 2}),):
            V = gen_nonidentical_propa(n, 3 * n * n)
            k = 2 * n
            assert certify_forced_block(V, "propa", n * k, prefix=n * n).prefix_forced == 1
            cert = certify_forced_block(V, "propa", n * k + n, prefix=n * n)
            assert cert.prefix_forced is None
            assert {o[0] for o in cert.prefix_owners} == owners

    def test_json(self):
        cert = certify_forced_block(gen_identical_ones(2, 3), "propa", 3, item=1, prefix=1)
        out = cert.to_json("abc")
        assert out["owners"] == [1] and out["item"] == 1 and out["prefix_forced_owner"] == 1
        assert out["instance_digest"] == "abc" and out["notion"] == "PROPA"

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            certify_forced_block(gen_identical_ones(3, 40), "propa", 40, budget=50)


def _networkx_optimum(V, notion, contiguous=True):
    G = nx.DiGraph()
    layers = [valid_allocations(V.prefix(t), notion, contiguous) for t in range(1, V.t + 1)]
    for a in layers[0]:
        G.add_edge("s", (1, a.owner), weight=0)
    for t, (prev, layer) in enumerate(zip(layers, layers[1:]), 1):
        for p in prev:
            for q in layer:
                G.add_edge((t, p.owner), (t + 1, q.owner), weight=count_adjustments(p, q))
    for a in layers[-1]:
        G.add_edge((V.t, a.owner), "z", weight=0)
    return nx.shortest_path_length(G, "s", "z", weight="weight")


class TestSchedule:
    def test_matches_networkx(self, rng):
        for _ in range(25):
            n, t = rng.randint(2, 3), rng.randint(1, 6)
            V = random_profile(rng, n, t, 0, 4, identical=rng.random() < 0.5)
            for notion, contiguous in (("ef1", True), ("eq1", True), ("ef1", False)):
                sched = min_adjustment_schedule(V, notion, contiguous)
                assert sched.feasible
                assert sched.optimum == _networkx_optimum(V, notion, contiguous)
                walked = sum(count_adjustments(a, b) for a, b in zip(sched.allocations, sched.allocations[1:]))
                assert walked == sched.optimum

    def test_greedy_instance_needs_nothing(self):
        V = ValuationProfile.identical_values(3, [2, 2, 2, 2, 2])
        assert min_adjustment_schedule(V, "ef1", contiguous=False).optimum == 0

    def test_identical_ones_propa(self):
        sched = min_adjustment_schedule(gen_identical_ones(2, 8), "propa")
        assert sched.optimum == 3

    def test_infeasible_round_reported(self):
        # EF is impossible for one good and two agents who both like it
        sched = min_adjustment_schedule(ValuationProfile(((1, 1), (1, 1))), "ef")
        assert not sched.feasible and sched.infeasible_round == 1 and sched.optimum is None

    def test_edge_budget(self):
        with pytest.raises(BudgetExceeded):
            min_adjustment_schedule(gen_identical_ones(3, 8), "ef1", contiguous=False, budget=500)

    def test_empty_profile(self):
        assert min_adjustment_schedule(ValuationProfile(((), ())), "ef1").optimum == 0


def test_valid_allocations_respects_order_choice():
    V = ValuationProfile(((1, 0), (0, 1)))
    fixed = {a.owner for a in valid_allocations(V, "ef", permute=False)}
    free = {a.owner for a in valid_allocations(V, "ef", permute=True)}
    assert fixed == {(1, 2)} and free == {(1, 2)}
    assert {a.owner for a in valid_allocations(V, "ef1", permute=True)} >= fixed
