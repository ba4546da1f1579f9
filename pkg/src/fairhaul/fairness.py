"""Envy-based fairness predicates and greedy assignment mechanisms.

Costs are identical across agents, so envy-freeness collapses to all
bundle costs being equal, and the one-removal relaxation compares each
agent's best single-order discount against everyone else's cost. The two
mechanisms assign dead ends only (interior orders follow by repair):
round-robin lets agents pick their cheapest marginal leaf in rotation;
the envy-graph mechanism hands each leaf to a currently unenvied agent.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from . import structure
from .errors import TopologyClassError
from .model import (
    Allocation,
    Instance,
    Topology,
    allocation_costs,
    bundle_cost,
)
from .nonwaste import complete_from_leaves


def is_ef(instance: Instance, alloc: Allocation) -> bool:
    """Envy-freeness under identical costs: every bundle costs the same."""
    costs = allocation_costs(instance, alloc)
    return len(set(costs)) <= 1


def is_ef1(instance: Instance, alloc: Allocation) -> bool:
    """Envy-freeness up to one order, chores style: each nonempty bundle
    admits one order whose removal brings its cost to at most everyone
    else's."""
    costs = allocation_costs(instance, alloc)
    if instance.agents == 1:
        return True
    top = instance.topology
    bundles = alloc.bundles(instance.agents)
    for i in range(instance.agents):
        if not bundles[i]:
            continue
        others_min = min(c for j, c in enumerate(costs) if j != i)
        if costs[i] <= others_min:
            continue
        discounted = min(
            bundle_cost(top, bundles[i] - {v}) for v in bundles[i]
        )
        if discounted > others_min:
            return False
    return True


def _leaf_rank(top: Topology, tie_break: Sequence[str] | None) -> dict[str, int]:
    if tie_break is None:
        ordered = sorted(top.leaf_ids)
    else:
        ordered = list(tie_break)
        if set(ordered) != set(top.leaf_ids):
            raise ValueError("tie_break must be a permutation of the leaves")
    return {leaf: i for i, leaf in enumerate(ordered)}


def round_robin(
    instance: Instance,
    agent_order: Sequence[int] | None = None,
    tie_break: Sequence[str] | None = None,
) -> Allocation:
    """Rotating greedy selection over the dead ends.

    Agents take turns in ``agent_order`` (default 1..n); on each turn the
    agent grabs the leaf with the smallest marginal cost for their current
    bundle, breaking ties by ``tie_break`` position (default: smallest
    identifier). Interior orders are then assigned by repair.
    """
    top = instance.topology
    n = instance.agents
    if agent_order is None:
        agent_order = list(range(1, n + 1))
    if sorted(agent_order) != list(range(1, n + 1)):
        raise ValueError("agent_order must be a permutation of 1..n")
    rank = _leaf_rank(top, tie_break)
    remaining = set(top.leaf_ids)
    bundles: dict[int, set[str]] = {a: set() for a in agent_order}
    leaf_assignment: dict[str, int] = {}
    turn = 0
    while remaining:
        agent = agent_order[turn % n]
        turn += 1
        base = bundle_cost(top, bundles[agent])
        pick = min(
            remaining,
            key=lambda leaf: (
                bundle_cost(top, bundles[agent] | {leaf}) - base,
                rank[leaf],
            ),
        )
        bundles[agent].add(pick)
        leaf_assignment[pick] = agent
        remaining.remove(pick)
    return complete_from_leaves(instance, leaf_assignment)


def envy_cycle(
    instance: Instance,
    leaf_order: Sequence[str] | None = None,
    tie_break: Sequence[int] | None = None,
) -> Allocation:
    """Envy-graph mechanism over the dead ends.

    Leaves are processed in ``leaf_order`` (default: by distance, then
    identifier); each goes to an agent no one of whose bundles it envies,
    i.e. a current minimum-cost agent (identical costs guarantee one
    exists, so the no-unenvied-agent failure mode cannot trigger here).
    ``tie_break`` orders agents for tie resolution (default ascending).
    """
    top = instance.topology
    n = instance.agents
    if leaf_order is None:
        leaf_order = sorted(top.leaf_ids, key=lambda v: (top.dist[top.index(v)], v))
    elif sorted(leaf_order) != sorted(top.leaf_ids):
        raise ValueError("leaf_order must be a permutation of the leaves")
    if tie_break is None:
        tie_break = list(range(1, n + 1))
    if sorted(tie_break) != list(range(1, n + 1)):
        raise ValueError("tie_break must be a permutation of 1..n")
    pref = {a: i for i, a in enumerate(tie_break)}
    bundles: dict[int, set[str]] = {a: set() for a in range(1, n + 1)}
    costs: dict[int, Fraction] = {a: Fraction(0) for a in bundles}
    leaf_assignment: dict[str, int] = {}
    for leaf in leaf_order:
        low = min(costs.values())
        unenvied = [a for a, c in costs.items() if c == low]
        if not unenvied:  # unreachable with identical costs; kept as a guard
            raise RuntimeError("no unenvied agent available")
        agent = min(unenvied, key=lambda a: pref[a])
        bundles[agent].add(leaf)
        costs[agent] = bundle_cost(top, bundles[agent])
        leaf_assignment[leaf] = agent
    return complete_from_leaves(instance, leaf_assignment)


def _require_equal_weight_star(instance: Instance) -> None:
    top = instance.topology
    if not structure.is_star(top):
        raise TopologyClassError("topology is not a hub-centered star")
    if not top.is_unweighted():
        raise TopologyClassError("star has more than one edge weight")


def star_ef(instance: Instance) -> Allocation | None:
    """On an equal-weight star an envy-free allocation exists iff the order
    count divides evenly; returns a balanced allocation or None."""
    _require_equal_weight_star(instance)
    if instance.m % instance.agents != 0:
        return None
    return star_ef1(instance)


def star_ef1(instance: Instance) -> Allocation:
    """Balanced round-robin allocation on an equal-weight star; always EF1
    (bundle sizes differ by at most one) and trivially non-wasteful."""
    _require_equal_weight_star(instance)
    n = instance.agents
    assignment = {
        leaf: (i % n) + 1
        for i, leaf in enumerate(sorted(instance.topology.leaf_ids))
    }
    return Allocation(assignment)


def incompatibility_instances() -> tuple[Instance, Instance]:
    """Two smallest instances separating envy-based fairness from
    non-wastefulness.

    First: a four-vertex path (hub next to one end) where envy-free and
    non-wasteful allocations both exist but never coincide. Second: the
    same with one extra order pendant on the far leaf, which does the same
    for the one-removal relaxation.
    """
    ef = Instance(
        Topology([("u", "h", 1), ("h", "x", 1), ("x", "v", 1)], "h"), 2
    )
    ef1 = Instance(
        Topology(
            [("u", "h", 1), ("h", "x", 1), ("x", "v", 1), ("v", "w", 1)], "h"
        ),
        2,
    )
    return ef, ef1


def mechanism_failure_instance() -> Instance:
    """Two-branch instance on which both greedy mechanisms miss every
    fair-and-non-wasteful allocation.

    Dead ends sit at distances 2, 4 and 6; the two farther ones share a
    two-edge prefix, so pairing the near and far leaves (cost 8) looks
    locally attractive but cannot be fixed by removing one order, while
    the balanced 6/6 split exists.
    """
    edges = [
        ("h", "a1", 1), ("a1", "ell1", 1),
        ("h", "b1", 1), ("b1", "b2", 1), ("b2", "b3", 1), ("b3", "ell2", 1),
        ("b2", "c1", 1), ("c1", "c2", 1), ("c2", "c3", 1), ("c3", "ell3", 1),
    ]
    return Instance(Topology(edges, "h"), 2)
