import itertools

import pytest

from fairhaul import (
    Allocation,
    Instance,
    Topology,
    TopologyClassError,
    allocation_costs,
    envy_cycle,
    incompatibility_instances,
    is_ef,
    is_ef1,
    is_nonwasteful,
    mechanism_failure_instance,
    round_robin,
    star_ef,
    star_ef1,
)
from fairhaul.oracle import enumerate_all_allocations
from conftest import unit_star


def test_is_ef(branching7, wasteful_alloc, tidy_alloc):
    assert is_ef(branching7, wasteful_alloc)       # costs (3, 3, 3)
    assert not is_ef(branching7, tidy_alloc)       # costs (3, 2, 3)
    single = Instance(Topology([("h", "a", 1)], "h"), 1)
    assert is_ef(single, Allocation({"a": 1}))


def test_is_ef1_star_sizes():
    inst = unit_star(5, 2)
    alloc = star_ef1(inst)
    assert sorted(len(alloc.bundle(a)) for a in (1, 2)) == [2, 3]
    assert is_ef1(inst, alloc)


def test_is_ef1_two_order_path():
    inst = Instance(Topology([("h", "a", 1), ("a", "b", 1)], "h"), 2)
    lopsided = Allocation({"a": 1, "b": 1})
    # removing either order leaves cost >= 1 against an empty bundle
    assert not is_ef1(inst, lopsided)


def test_ef_implies_ef1_randomized(branching7):
    for alloc in enumerate_all_allocations(branching7):
        if is_ef(branching7, alloc):
            assert is_ef1(branching7, alloc)


def test_round_robin_on_failure_instance():
    inst = mechanism_failure_instance()
    alloc = round_robin(inst)
    costs = allocation_costs(inst, alloc)
    assert sorted(costs) == [4, 8]
    assert is_nonwasteful(inst, alloc)
    assert not is_ef1(inst, alloc)


def test_round_robin_trivia():
    star = unit_star(4, 2)
    alloc = round_robin(star)
    assert sorted(len(alloc.bundle(a)) for a in (1, 2)) == [2, 2]
    assert is_ef(star, alloc)
    lone = Instance(Topology([("h", "a", 1)], "h"), 3)
    assert round_robin(lone)["a"] == 1


def test_envy_cycle_on_failure_instance():
    inst = mechanism_failure_instance()
    alloc = envy_cycle(inst)
    assert sorted(allocation_costs(inst, alloc)) == [4, 8]
    assert not is_ef1(inst, alloc)


def test_envy_cycle_trivia():
    star = unit_star(6, 3)
    alloc = envy_cycle(star)
    assert sorted(len(alloc.bundle(a)) for a in (1, 2, 3)) == [2, 2, 2]
    lone = Instance(Topology([("h", "a", 1), ("a", "b", 1)], "h"), 1)
    assert envy_cycle(lone).assignment == {"a": 1, "b": 1}


def test_envy_cycle_order_sensitivity():
    # processing far to near lets the mechanism succeed; the natural
    # near-to-far order is what traps it
    inst = mechanism_failure_instance()
    far_first = ["ell3", "ell2", "ell1"]
    alloc = envy_cycle(inst, leaf_order=far_first)
    assert is_ef(inst, alloc)


def test_star_ef():
    assert star_ef(unit_star(5, 2)) is None
    balanced = star_ef(unit_star(6, 3))
    assert balanced is not None
    assert allocation_costs(unit_star(6, 3), balanced) == [2, 2, 2]
    each = star_ef(unit_star(3, 3))
    assert sorted(len(each.bundle(a)) for a in (1, 2, 3)) == [1, 1, 1]


def test_star_ef1_sizes():
    inst = unit_star(7, 3)
    alloc = star_ef1(inst)
    assert sorted(len(alloc.bundle(a)) for a in (1, 2, 3)) == [2, 2, 3]
    assert is_ef1(inst, alloc)
    assert is_nonwasteful(inst, alloc)
    tiny = unit_star(1, 1)
    assert len(star_ef1(tiny).bundle(1)) == 1


def test_star_helpers_reject_other_topologies(branching7):
    with pytest.raises(TopologyClassError):
        star_ef(branching7)
    with pytest.raises(TopologyClassError):
        star_ef1(branching7)


def test_incompatibility_instances_shapes():
    ef_inst, ef1_inst = incompatibility_instances()
    assert ef_inst.m == 3 and ef_inst.agents == 2
    assert ef1_inst.m == 4 and ef1_inst.agents == 2


@pytest.mark.parametrize("which,predicate", [(0, is_ef), (1, is_ef1)])
def test_incompatibility_separation(which, predicate):
    inst = incompatibility_instances()[which]
    fair = []
    tidy = []
    for alloc in enumerate_all_allocations(inst):
        if predicate(inst, alloc):
            fair.append(alloc)
        if is_nonwasteful(inst, alloc):
            tidy.append(alloc)
    assert fair and tidy
    assert not [a for a in fair if is_nonwasteful(inst, a)]


def test_mechanism_tie_break_validation():
    inst = unit_star(3, 2)
    with pytest.raises(ValueError):
        round_robin(inst, agent_order=[1, 1])
    with pytest.raises(ValueError):
        envy_cycle(inst, leaf_order=["o1"])
