"""Verification and repair of non-wasteful allocations.

An allocation is non-wasteful when every order's agent also services some
dead-end (leaf) further down that order's subtree, so nobody drives past
their last delivery. Verification propagates agent-presence sets upward
from the leaves; repair reassigns interior orders by walking hub-ward from
each leaf, which never raises any agent's cost and keeps leaf ownership
intact.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import SolverError
from .model import Allocation, Instance, SolveReport, allocation_costs


def verify_nonwasteful(
    instance: Instance, alloc: Allocation
) -> tuple[bool, tuple[str, int] | None]:
    """Decide non-wastefulness; on failure return the first violating
    (order, agent) pair in preorder from the hub (children in id order).
    """
    alloc.validate(instance)
    top = instance.topology
    nvert = len(top.vertex_ids)
    present: list[set[int]] = [set() for _ in range(nvert)]
    for leaf in top.leaf_indices:
        agent = alloc.assignment[top.vertex_ids[leaf]]
        v = leaf
        while v != top.hub_index and agent not in present[v]:
            present[v].add(agent)
            v = top.parent_index[v]
    stack = list(reversed(top.children_index[top.hub_index]))
    while stack:
        v = stack.pop()
        agent = alloc.assignment[top.vertex_ids[v]]
        if agent not in present[v]:
            return False, (top.vertex_ids[v], agent)
        stack.extend(reversed(top.children_index[v]))
    return True, None


def is_nonwasteful(instance: Instance, alloc: Allocation) -> bool:
    return verify_nonwasteful(instance, alloc)[0]


def verify_nonwasteful_naive(
    instance: Instance, alloc: Allocation
) -> tuple[bool, tuple[str, int] | None]:
    """Quadratic reference check: scan each order's whole subtree for a leaf
    serviced by the same agent. Kept as an independent oracle for tests."""
    alloc.validate(instance)
    top = instance.topology
    stack = list(reversed(top.children_index[top.hub_index]))
    while stack:
        v = stack.pop()
        agent = alloc.assignment[top.vertex_ids[v]]
        ok = False
        for u in top.subtree_order_indices(v):
            if not top.children_index[u] and alloc.assignment[top.vertex_ids[u]] == agent:
                ok = True
                break
        if not ok:
            return False, (top.vertex_ids[v], agent)
        stack.extend(reversed(top.children_index[v]))
    return True, None


def repair_to_nonwasteful(instance: Instance, alloc: Allocation) -> Allocation:
    """Rebuild an allocation into a non-wasteful one.

    Leaf ownership is preserved exactly; every interior order is claimed by
    walking hub-ward from the leaves, lowest agent index first, stopping at
    the first already-claimed order. Per-agent costs never increase.
    """
    alloc.validate(instance)
    leaf_assignment = {
        leaf: alloc.assignment[leaf] for leaf in instance.topology.leaf_ids
    }
    return complete_from_leaves(instance, leaf_assignment)


def complete_from_leaves(
    instance: Instance, leaf_assignment: dict[str, int]
) -> Allocation:
    """Extend an assignment of all leaves into a full non-wasteful allocation.

    Interior orders are claimed bottom-up: agents are processed in ascending
    index order, each of their leaves walks toward the hub claiming every
    still-unclaimed order and stops at the first claimed one.
    """
    top = instance.topology
    if set(leaf_assignment) != set(top.leaf_ids):
        raise SolverError("leaf assignment must cover exactly the leaves")
    owner = [0] * len(top.vertex_ids)
    by_agent: dict[int, list[int]] = {}
    for leaf, agent in leaf_assignment.items():
        by_agent.setdefault(agent, []).append(top.index(leaf))
    for agent in sorted(by_agent):
        for v in sorted(by_agent[agent]):
            while v != top.hub_index and owner[v] == 0:
                owner[v] = agent
                v = top.parent_index[v]
    assignment = {
        top.vertex_ids[i]: owner[i] for i in top.order_indices
    }
    out = Allocation(assignment)
    out.validate(instance)
    return out


def validate_report(instance: Instance, report: SolveReport) -> None:
    """Assert the solver contract: the witness is non-wasteful and its worst
    bundle cost equals the reported share exactly."""
    if report.share < 0:
        raise SolverError(f"negative share {report.share}")
    if report.allocation is None:
        return
    ok, witness = verify_nonwasteful(instance, report.allocation)
    if not ok:
        raise SolverError(f"witness is wasteful at {witness}")
    costs = allocation_costs(instance, report.allocation)
    worst = max(costs, default=Fraction(0))
    if worst != report.share:
        raise SolverError(
            f"witness max cost {worst} != reported share {report.share} "
            f"({report.algorithm})"
        )
