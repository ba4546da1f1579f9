"""Exponential-time ground truth for desk-scale instances.

Everything here trades speed for independence: these routines enumerate,
so they are trustworthy references for the clever solvers. All of them
refuse instances beyond an explicit budget instead of silently truncating.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import BudgetExceededError, FairhaulError
from .model import (
    Allocation,
    Instance,
    SolveReport,
    allocation_costs,
    mask_weight,
    order_path_masks,
    order_positions,
    scaled_parent_weights,
)
from .nonwaste import complete_from_leaves, validate_report

DEFAULT_MAX_LEAVES = 12
DEFAULT_MAX_AGENTS = 5
DEFAULT_MAX_ASSIGNMENTS = 5_000_000


def brute_force_mms(
    instance: Instance,
    agent_cap: int | None = None,
    *,
    max_leaves: int = DEFAULT_MAX_LEAVES,
    max_agents: int = DEFAULT_MAX_AGENTS,
) -> SolveReport:
    """Exact share by enumerating assignments of leaves to agents.

    Only leaf assignments matter: repairing any allocation preserves leaf
    ownership and never raises costs, so the optimum is attained on an
    allocation determined by its leaf sets. Agents are interchangeable, so
    the enumeration walks restricted-growth strings (first leaf to agent 1)
    with branch-and-bound on the running worst bundle.
    """
    top = instance.topology
    leaves = list(top.leaf_indices)
    n_eff = min(instance.agents, len(leaves))
    if agent_cap is not None:
        n_eff = min(n_eff, agent_cap)
    if len(leaves) > max_leaves or n_eff > max_agents:
        raise BudgetExceededError(
            f"brute force budget: L={len(leaves)} (max {max_leaves}), "
            f"n={n_eff} (max {max_agents})"
        )
    if top.m == 0:
        report = SolveReport(Fraction(0), Allocation({}), "brute", {"partitions": 1})
        validate_report(instance, report)
        return report

    pos = order_positions(top)
    masks = order_path_masks(top)
    weights, scale = scaled_parent_weights(top)
    leaf_masks = [masks[v] for v in leaves]

    best = [None, None]  # (max scaled cost, blocks)
    stats = {"partitions": 0, "nodes": 0}

    block_masks: list[int] = []
    block_costs: list[int] = []
    block_leaves: list[list[int]] = []

    def recurse(idx: int, current_max: int) -> None:
        stats["nodes"] += 1
        if best[0] is not None and current_max >= best[0]:
            return
        if idx == len(leaves):
            stats["partitions"] += 1
            best[0] = current_max
            best[1] = [list(b) for b in block_leaves]
            return
        lm = leaf_masks[idx]
        for b in range(len(block_masks)):
            new_bits = lm & ~block_masks[b]
            added = mask_weight(new_bits, weights)
            block_masks[b] |= new_bits
            block_costs[b] += added
            block_leaves[b].append(idx)
            recurse(idx + 1, max(current_max, block_costs[b]))
            block_leaves[b].pop()
            block_costs[b] -= added
            block_masks[b] ^= new_bits
        if len(block_masks) < n_eff:
            # open a fresh block; agents are interchangeable, so one suffices
            block_masks.append(lm)
            block_costs.append(mask_weight(lm, weights))
            block_leaves.append([idx])
            recurse(idx + 1, max(current_max, block_costs[-1]))
            block_masks.pop()
            block_costs.pop()
            block_leaves.pop()

    recurse(0, 0)
    assert best[1] is not None
    leaf_assignment: dict[str, int] = {}
    for agent0, block in enumerate(best[1]):
        for li in block:
            leaf_assignment[top.vertex_ids[leaves[li]]] = agent0 + 1
    witness = complete_from_leaves(instance, leaf_assignment)
    report = SolveReport(Fraction(best[0], scale), witness, "brute", stats)
    validate_report(instance, report)
    return report


def enumerate_all_allocations(instance: Instance) -> Iterator[Allocation]:
    """Every total assignment of orders to agents; n**m of them."""
    orders = instance.topology.order_ids
    for combo in itertools.product(range(1, instance.agents + 1), repeat=len(orders)):
        yield Allocation(dict(zip(orders, combo)))


def _check_enumeration_budget(instance: Instance, max_assignments: int) -> None:
    if instance.agents ** instance.m > max_assignments:
        raise BudgetExceededError(
            f"enumeration budget: {instance.agents}**{instance.m} assignments "
            f"exceeds {max_assignments}"
        )


def enumerate_nonwasteful(
    instance: Instance, *, max_assignments: int = DEFAULT_MAX_ASSIGNMENTS
) -> Iterator[Allocation]:
    """Stream exactly the non-wasteful allocations.

    Generated as (assignment of leaves) x (per interior order, a choice among
    the agents that own a leaf in its subtree), which is precisely the
    non-wastefulness condition.
    """
    _check_enumeration_budget(instance, max_assignments)
    top = instance.topology
    leaves = list(top.leaf_indices)
    interior = [v for v in top.order_indices if top.children_index[v]]
    below: dict[int, list[int]] = {
        v: [u for u in top.subtree_order_indices(v) if not top.children_index[u]]
        for v in interior
    }
    for combo in itertools.product(range(1, instance.agents + 1), repeat=len(leaves)):
        leaf_agent = dict(zip(leaves, combo))
        choice_sets = []
        for v in interior:
            owners = sorted({leaf_agent[u] for u in below[v]})
            choice_sets.append(owners)
        for interior_combo in itertools.product(*choice_sets):
            assignment = {top.vertex_ids[v]: a for v, a in leaf_agent.items()}
            assignment.update(
                {top.vertex_ids[v]: a for v, a in zip(interior, interior_combo)}
            )
            yield Allocation(assignment)


def utilitarian_opt(instance: Instance) -> Fraction:
    """Minimum total cost over all allocations: give everything to one agent,
    which costs the full tree weight."""
    return instance.topology.total_weight


def egalitarian_opt(
    instance: Instance, *, max_assignments: int = DEFAULT_MAX_ASSIGNMENTS
) -> Fraction:
    """Minimum worst bundle cost, by full enumeration of all n**m assignments.

    Deliberately independent of the leaf-partition reduction used elsewhere.
    """
    _check_enumeration_budget(instance, max_assignments)
    best: Fraction | None = None
    for alloc in enumerate_all_allocations(instance):
        worst = max(allocation_costs(instance, alloc), default=Fraction(0))
        if best is None or worst < best:
            best = worst
    return best if best is not None else Fraction(0)


def is_pareto_optimal(
    instance: Instance,
    alloc: Allocation,
    *,
    max_assignments: int = DEFAULT_MAX_ASSIGNMENTS,
) -> bool:
    """True iff no other allocation weakly improves every agent and strictly
    improves at least one. Enumeration only; no shortcut exists."""
    _check_enumeration_budget(instance, max_assignments)
    base = allocation_costs(instance, alloc)
    for other in enumerate_all_allocations(instance):
        costs = allocation_costs(instance, other)
        if all(c <= b for c, b in zip(costs, base)) and any(
            c < b for c, b in zip(costs, base)
        ):
            return False
    return True


@dataclass(frozen=True)
class PonwReport:
    """Efficiency loss of insisting on non-wastefulness, for one benchmark."""

    benchmark: str           # "UTIL" or "EGAL"
    best_nw: Fraction        # benchmark value of the best non-wasteful allocation
    worst_nw: Fraction       # ... of the worst non-wasteful allocation
    opt: Fraction            # unrestricted optimum
    optimistic_ratio: Fraction
    pessimistic_ratio: Fraction

    def __post_init__(self):
        if not self.opt <= self.best_nw <= self.worst_nw:
            raise FairhaulError(
                f"inconsistent report: opt={self.opt} best={self.best_nw} "
                f"worst={self.worst_nw}"
            )


def ponw(
    instance: Instance,
    benchmark: str,
    *,
    max_assignments: int = DEFAULT_MAX_ASSIGNMENTS,
) -> PonwReport:
    """Exhaustive optimistic/pessimistic price of non-wastefulness."""
    benchmark = benchmark.upper()
    if benchmark not in ("UTIL", "EGAL"):
        raise ValueError(f"benchmark must be UTIL or EGAL, got {benchmark!r}")
    _check_enumeration_budget(instance, max_assignments)

    def measure(alloc: Allocation) -> Fraction:
        costs = allocation_costs(instance, alloc)
        if benchmark == "UTIL":
            return sum(costs, Fraction(0))
        return max(costs, default=Fraction(0))

    if benchmark == "UTIL":
        opt = utilitarian_opt(instance)
    else:
        opt = egalitarian_opt(instance, max_assignments=max_assignments)
    if opt == 0:
        raise FairhaulError("price of non-wastefulness undefined: optimum is 0")

    best_nw = worst_nw = None
    for alloc in enumerate_nonwasteful(instance, max_assignments=max_assignments):
        value = measure(alloc)
        if best_nw is None or value < best_nw:
            best_nw = value
        if worst_nw is None or value > worst_nw:
            worst_nw = value
    assert best_nw is not None and worst_nw is not None
    return PonwReport(
        benchmark=benchmark,
        best_nw=best_nw,
        worst_nw=worst_nw,
        opt=opt,
        optimistic_ratio=best_nw / opt,
        pessimistic_ratio=worst_nw / opt,
    )
