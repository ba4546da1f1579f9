import random
from fractions import Fraction

import pytest

from fairhaul import (
    Allocation,
    BudgetExceededError,
    Instance,
    Topology,
    allocation_costs,
    brute_force_mms,
    egalitarian_opt,
    enumerate_nonwasteful,
    gen_random_tree,
    is_nonwasteful,
    is_pareto_optimal,
    ponw,
    utilitarian_opt,
    verify_nonwasteful,
)
from fairhaul.oracle import enumerate_all_allocations
from conftest import two_branch_instance, unit_star


def test_brute_force_examples(branching7):
    assert brute_force_mms(branching7).share == 3
    assert brute_force_mms(unit_star(5, 2)).share == 3
    single = Instance(Topology([("h", "a", Fraction(7, 2))], "h"), 4)
    assert brute_force_mms(single).share == Fraction(7, 2)


def test_brute_force_witness_is_nonwasteful(branching7):
    report = brute_force_mms(branching7)
    ok, _ = verify_nonwasteful(branching7, report.allocation)
    assert ok
    assert max(allocation_costs(branching7, report.allocation)) == report.share


def test_brute_force_budget():
    with pytest.raises(BudgetExceededError):
        brute_force_mms(unit_star(20, 2))
    # explicit cap on agents used
    report = brute_force_mms(unit_star(6, 30), agent_cap=3)
    assert report.share == 2


def test_enumerate_nonwasteful_path_counts():
    path = Instance(Topology([("h", "a", 1), ("a", "b", 1)], "h"), 1)
    assert len(list(enumerate_nonwasteful(path))) == 1
    path2 = Instance(Topology([("h", "a", 1), ("a", "b", 1)], "h"), 2)
    allocs = list(enumerate_nonwasteful(path2))
    # b's owner is forced to own a as well
    assert len(allocs) == 2
    assert all(a["a"] == a["b"] for a in allocs)


def test_enumerate_nonwasteful_matches_filter(branching7):
    streamed = {
        tuple(sorted(a.assignment.items()))
        for a in enumerate_nonwasteful(branching7)
    }
    filtered = {
        tuple(sorted(a.assignment.items()))
        for a in enumerate_all_allocations(branching7)
        if is_nonwasteful(branching7, a)
    }
    assert streamed == filtered and streamed


def test_optima(branching7):
    assert utilitarian_opt(branching7) == 6
    assert egalitarian_opt(branching7) == 3


def test_brute_equals_independent_egalitarian():
    for seed in range(30):
        rng = random.Random(seed)
        inst = gen_random_tree(
            rng.randint(1, 7), max_weight=rng.choice([1, 3]),
            seed=seed + 17, agents=rng.randint(1, 3),
        )
        assert brute_force_mms(inst).share == egalitarian_opt(inst)


def test_pareto_counterexample():
    # non-wasteful and share-attaining, yet improvable by a three-order swap
    edges = [
        ("h", "v1", 1), ("h", "v2", 1), ("h", "v3", 1),
        ("v1", "v4", 1), ("v1", "v5", 1), ("v2", "v6", 1),
        ("v3", "v7", 1), ("v7", "v8", 1), ("v8", "v9", 1),
    ]
    inst = Instance(Topology(edges, "h"), 3)
    alloc = Allocation(
        {"v1": 1, "v2": 1, "v4": 1, "v6": 1, "v5": 3,
         "v3": 2, "v7": 2, "v8": 2, "v9": 2}
    )
    assert is_nonwasteful(inst, alloc)
    assert max(allocation_costs(inst, alloc)) == brute_force_mms(inst).share
    assert not is_pareto_optimal(inst, alloc)


def test_ponw_report_chain():
    for seed in range(12):
        inst = gen_random_tree(random.Random(seed).randint(2, 6), seed=seed, agents=2)
        for benchmark in ("UTIL", "EGAL"):
            rep = ponw(inst, benchmark)
            assert rep.opt <= rep.best_nw <= rep.worst_nw
            assert rep.optimistic_ratio == rep.best_nw / rep.opt
            assert rep.pessimistic_ratio == rep.worst_nw / rep.opt


def test_ponw_rejects_unknown_benchmark(branching7):
    with pytest.raises(ValueError):
        ponw(branching7, "RAWLS")
