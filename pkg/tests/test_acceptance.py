"""Acceptance suite: one test per release criterion, exact arithmetic only.

Each test prints a single PASS line on success so a `-s` run reads as a
checklist. Asymptotic runtime claims are not re-measured here; the two
wall-clock guards below are coarse sanity bounds, and everything else is
covered by the explicit size budgets.
"""
import itertools
import random
import time
from fractions import Fraction

from fairhaul import (
    Allocation,
    Budgets,
    Instance,
    Topology,
    allocation_costs,
    brute_force_mms,
    envy_cycle,
    gen_3partition_depth2,
    gen_3partition_star,
    gen_binpacking_paths,
    gen_equitable_star,
    gen_ponw_util,
    gen_random_tree,
    gen_spider,
    incompatibility_instances,
    is_ef,
    is_ef1,
    is_nonwasteful,
    mechanism_failure_instance,
    ponw,
    repair_to_nonwasteful,
    round_robin,
    solve,
    solve_caterpillar,
    solve_internal_ilp,
    solve_leaf_dp,
    verify_nonwasteful,
)
from fairhaul.oracle import enumerate_all_allocations
from fairhaul.structure import classify, is_caterpillar
from conftest import two_branch_instance, unit_star


def _random_suite(count, max_m, max_leaves, max_n, max_weight, seed_base):
    """Deterministic stream of random instances within the given limits."""
    out = []
    seed = seed_base
    while len(out) < count:
        rng = random.Random(seed)
        inst = gen_random_tree(
            rng.randint(1, max_m),
            max_weight=rng.randint(1, max_weight),
            seed=seed,
            agents=rng.randint(1, max_n),
        )
        if len(inst.topology.leaf_ids) <= max_leaves:
            out.append(inst)
        seed += 1
    return out


def test_criterion_1_unweighted_star_formula():
    start = time.perf_counter()
    for m in range(1, 61):
        top = Topology([("h", f"o{i}", 1) for i in range(1, m + 1)], "h")
        for n in range(1, m + 1):
            report = solve(Instance(top, n))
            assert report.share == Fraction(-(-m // n)), (m, n, report.share)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"star sweep took {elapsed:.2f}s"
    print(f"ACCEPTANCE 1 unweighted-star-formula: PASS ({elapsed:.2f}s)")


def test_criterion_2_oracle_equivalence():
    start = time.perf_counter()
    budgets = Budgets(ilp_weights=5)
    instances = _random_suite(200, max_m=12, max_leaves=8, max_n=4,
                              max_weight=5, seed_base=20_000)
    used = {"caterpillar": 0, "internal-ilp": 0}
    for inst in instances:
        expect = brute_force_mms(inst).share
        assert solve_leaf_dp(inst).share == expect
        assert solve(inst).share == expect
        if inst.topology.is_unweighted() and is_caterpillar(inst.topology):
            assert solve_caterpillar(inst).share == expect
            used["caterpillar"] += 1
        if classify(inst)["k"] <= 3:
            assert solve_internal_ilp(inst, budgets).share == expect
            used["internal-ilp"] += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"equivalence sweep took {elapsed:.2f}s"
    assert min(used.values()) > 20, used
    print(f"ACCEPTANCE 2 oracle-equivalence: PASS "
          f"(200 instances, {used}, {elapsed:.2f}s)")


def test_criterion_3_repair_contract():
    for seed in range(500):
        rng = random.Random(30_000 + seed)
        n = rng.randint(1, 5)
        inst = gen_random_tree(
            rng.randint(1, 14), max_weight=rng.randint(1, 5),
            seed=30_000 + seed, agents=n,
        )
        alloc = Allocation({v: rng.randint(1, n) for v in inst.topology.order_ids})
        repaired = repair_to_nonwasteful(inst, alloc)
        assert verify_nonwasteful(inst, repaired)[0]
        before = allocation_costs(inst, alloc)
        after = allocation_costs(inst, repaired)
        assert all(a <= b for a, b in zip(after, before))
        for agent in range(1, n + 1):
            assert {v for v in inst.topology.leaf_ids if alloc[v] == agent} == \
                   {v for v in inst.topology.leaf_ids if repaired[v] == agent}
    print("ACCEPTANCE 3 repair-contract: PASS (500 allocations)")


def test_criterion_4_reference_figure_reproduction():
    inst = two_branch_instance()
    top_alloc = Allocation({"u1": 2, "u2": 2, "l1": 2, "u3": 3, "l2": 3, "l3": 1})
    bottom_alloc = Allocation({"u1": 2, "l1": 2, "u2": 1, "u3": 3, "l2": 3, "l3": 1})
    ok_top, witness = verify_nonwasteful(inst, top_alloc)
    assert not ok_top and witness == ("u2", 2)
    assert verify_nonwasteful(inst, bottom_alloc) == (True, None)
    repaired = repair_to_nonwasteful(inst, top_alloc)
    assert allocation_costs(inst, repaired) == [3, 2, 3]
    print("ACCEPTANCE 4 reference-figure: PASS")


def test_criterion_5_hub_on_dead_end():
    for seed in range(100):
        rng = random.Random(50_000 + seed)
        core = gen_random_tree(
            rng.randint(1, 9), max_weight=rng.randint(1, 4),
            seed=50_000 + seed, agents=rng.randint(1, 3),
        )
        if len(core.topology.leaf_ids) > 7:
            continue
        w = rng.randint(1, 5)
        edges = list(core.topology.edges()) + [("hub0", "h", w)]
        outer = Instance(Topology(edges, "hub0"), core.agents)
        # single-step removal: the new hub is the old hub's only neighbour
        assert brute_force_mms(outer).share == brute_force_mms(core).share + w
    print("ACCEPTANCE 5 hub-on-dead-end: PASS (100 instances)")


def test_criterion_6_ponw_tightness():
    for n in (2, 3):
        for m in range(n + 1, 10):
            rep = ponw(gen_ponw_util(m, n), "UTIL")
            assert rep.pessimistic_ratio == Fraction(n * (m - n + 1), m), (n, m)
            assert rep.optimistic_ratio == 1
        for length in range(1, 10):
            m = n * length
            if not n + 1 <= m <= 9:
                continue
            rep = ponw(gen_spider(n, length), "EGAL")
            assert rep.pessimistic_ratio == n, (n, length)
            assert rep.optimistic_ratio == 1
    print("ACCEPTANCE 6 ponw-tightness: PASS")


def test_criterion_7_incompatibility():
    for inst, predicate in zip(incompatibility_instances(), (is_ef, is_ef1)):
        fair = []
        tidy = []
        for alloc in enumerate_all_allocations(inst):
            if predicate(inst, alloc):
                fair.append(alloc)
            if is_nonwasteful(inst, alloc):
                tidy.append(alloc)
        assert fair, "fair set empty"
        assert tidy, "non-wasteful set empty"
        assert not [a for a in fair if is_nonwasteful(inst, a)], "intersection nonempty"
    print("ACCEPTANCE 7 incompatibility: PASS")


def test_criterion_8_mechanism_failure():
    inst = mechanism_failure_instance()
    leaves = list(inst.topology.leaf_ids)
    for agent_order in itertools.permutations([1, 2]):
        for tie_break in itertools.permutations(leaves):
            alloc = round_robin(inst, list(agent_order), list(tie_break))
            assert not is_ef1(inst, alloc), (agent_order, tie_break)
    natural = sorted(leaves, key=lambda v: inst.topology.dist[inst.topology.index(v)])
    for tie_break in itertools.permutations([1, 2]):
        alloc = envy_cycle(inst, natural, list(tie_break))
        assert not is_ef1(inst, alloc), tie_break
    envy_free = [
        a for a in enumerate_all_allocations(inst)
        if is_ef(inst, a) and is_nonwasteful(inst, a)
    ]
    assert envy_free, "no envy-free non-wasteful allocation found by enumeration"
    print("ACCEPTANCE 8 mechanism-failure: PASS")


def test_criterion_9_gadget_fidelity():
    def star_target(elements, k):
        return Fraction(sum(elements), k)

    solvable = [
        (gen_3partition_star([3, 3, 3, 3, 3, 3]), star_target([3] * 6, 2)),
        (gen_3partition_star([3, 3, 4, 4, 4, 4]), star_target([3, 3, 4, 4, 4, 4], 2)),
        (gen_3partition_star([1, 2, 3, 1, 2, 3]), star_target([1, 2, 3] * 2, 2)),
        (gen_equitable_star([3, 3, 3, 3]), star_target([3] * 4, 2)),
        (gen_equitable_star([2, 3, 3, 4]), star_target([2, 3, 3, 4], 2)),
        (gen_equitable_star([5, 5]), star_target([5, 5], 2)),
        (gen_binpacking_paths([3, 3], 2), Fraction(3)),
        (gen_binpacking_paths([1, 2, 2, 1, 3, 3], 4), Fraction(3)),
        (gen_binpacking_paths([2, 2, 2], 3), Fraction(2)),
        (gen_3partition_depth2([2, 2, 2, 2, 2, 2]), Fraction(6 + 3)),
    ]
    unsolvable = [
        (gen_3partition_star([5, 5, 5, 5, 5, 7]), star_target([5, 5, 5, 5, 5, 7], 2)),
        (gen_3partition_star([9, 6, 6, 6, 6, 7]), star_target([9, 6, 6, 6, 6, 7], 2)),
        (gen_equitable_star([2, 2, 3, 5]), star_target([2, 2, 3, 5], 2)),
        (gen_equitable_star([1, 1, 1, 5]), star_target([1, 1, 1, 5], 2)),
        (gen_equitable_star([3, 3, 3, 5]), star_target([3, 3, 3, 5], 2)),
        (gen_binpacking_paths([2, 2, 2], 2), Fraction(3)),
        (gen_binpacking_paths([3, 3, 3, 3], 3), Fraction(4)),
        (gen_binpacking_paths([1, 1, 4], 2), Fraction(3)),
        (gen_binpacking_paths([2, 3, 3], 2), Fraction(4)),
        (gen_3partition_depth2([1, 1, 1, 3, 3, 3]), Fraction(6 + 3)),
    ]
    assert len(solvable) == 10 and len(unsolvable) == 10
    for inst, target in solvable:
        assert brute_force_mms(inst).share <= target, (inst, target)
    for inst, target in unsolvable:
        assert brute_force_mms(inst).share > target, (inst, target)
    print("ACCEPTANCE 9 gadget-fidelity: PASS (10 + 10 sources)")


def test_criterion_10_witness_validity():
    reports = []
    for inst in _random_suite(60, max_m=12, max_leaves=8, max_n=4,
                              max_weight=5, seed_base=90_000):
        reports.append((inst, solve(inst)))
        reports.append((inst, brute_force_mms(inst)))
        reports.append((inst, solve_leaf_dp(inst)))
    reports.append((two_branch_instance(), solve_internal_ilp(two_branch_instance())))
    reports.append((unit_star(9, 4), solve(unit_star(9, 4))))
    for inst, report in reports:
        assert report.allocation is not None
        ok, _ = verify_nonwasteful(inst, report.allocation)
        assert ok, report.algorithm
        costs = allocation_costs(inst, report.allocation)
        assert max(costs, default=Fraction(0)) == report.share, report.algorithm
    print(f"ACCEPTANCE 10 witness-validity: PASS ({len(reports)} reports)")
