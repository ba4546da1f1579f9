import random

import pytest

from fairhaul import (
    Allocation,
    allocation_costs,
    closure,
    gen_random_tree,
    repair_to_nonwasteful,
    verify_nonwasteful,
    verify_nonwasteful_naive,
)
from fairhaul.errors import SolverError
from fairhaul.nonwaste import complete_from_leaves


def test_verify_rejects_wasteful(branching7, wasteful_alloc):
    ok, witness = verify_nonwasteful(branching7, wasteful_alloc)
    assert not ok
    # u2 is serviced by agent 2, whose only dead end (l1) is elsewhere
    assert witness == ("u2", 2)


def test_verify_accepts_tidy(branching7, tidy_alloc):
    assert verify_nonwasteful(branching7, tidy_alloc) == (True, None)


def test_single_agent_always_nonwasteful(branching7):
    everything = Allocation({v: 1 for v in branching7.topology.order_ids})
    assert verify_nonwasteful(branching7, everything)[0]


def test_repair_improves_wasteful(branching7, wasteful_alloc):
    repaired = repair_to_nonwasteful(branching7, wasteful_alloc)
    assert verify_nonwasteful(branching7, repaired)[0]
    assert allocation_costs(branching7, repaired) == [3, 2, 3]


def test_repair_keeps_costs_of_tidy_input(branching7, tidy_alloc):
    repaired = repair_to_nonwasteful(branching7, tidy_alloc)
    assert allocation_costs(branching7, repaired) == allocation_costs(
        branching7, tidy_alloc
    )


def test_repair_contract_randomized():
    for seed in range(120):
        rng = random.Random(seed)
        n = rng.randint(1, 4)
        inst = gen_random_tree(
            rng.randint(1, 12), max_weight=rng.choice([1, 5]), seed=seed, agents=n
        )
        alloc = Allocation({v: rng.randint(1, n) for v in inst.topology.order_ids})
        repaired = repair_to_nonwasteful(inst, alloc)
        assert verify_nonwasteful(inst, repaired)[0]
        before = allocation_costs(inst, alloc)
        after = allocation_costs(inst, repaired)
        assert all(a <= b for a, b in zip(after, before))
        for agent in range(1, n + 1):
            assert {v for v in inst.topology.leaf_ids if alloc[v] == agent} == {
                v for v in inst.topology.leaf_ids if repaired[v] == agent
            }
        # every repaired bundle sits on the hub paths of its own dead ends
        for agent in range(1, n + 1):
            own_leaves = {v for v in inst.topology.leaf_ids if repaired[v] == agent}
            assert repaired.bundle(agent) <= closure(inst.topology, own_leaves)


def test_fast_and_naive_verification_agree():
    for seed in range(120):
        rng = random.Random(9_000 + seed)
        n = rng.randint(1, 4)
        inst = gen_random_tree(rng.randint(1, 10), seed=seed, agents=n)
        alloc = Allocation({v: rng.randint(1, n) for v in inst.topology.order_ids})
        assert verify_nonwasteful(inst, alloc) == verify_nonwasteful_naive(inst, alloc)


def test_complete_from_leaves_requires_all_leaves(branching7):
    with pytest.raises(SolverError):
        complete_from_leaves(branching7, {"l1": 1})
