"""Share solvers: exact minimax-share computation with non-wasteful witnesses.

The portfolio covers the structures where exact solving is practical:
paths, stars (closed form / pseudo-polynomial partition DP), unweighted
caterpillars (greedy decision procedure per candidate share), few-leaf
instances (subset DP), few-junction instances (leaf-type feasibility
search), and a junction-reducing contraction that folds long corridors
into single edges. `solve` dispatches automatically; every witness is
validated against the reported share before it is returned.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields, replace
from fractions import Fraction

from . import structure
from .errors import BudgetExceededError, SolverError, TopologyClassError
from .model import (
    Allocation,
    Instance,
    SolveReport,
    Topology,
    mask_weight,
    order_path_masks,
    order_positions,
    scaled_parent_weights,
)
from .nonwaste import complete_from_leaves, repair_to_nonwasteful, validate_report
from .oracle import brute_force_mms

ENV_PREFIX = "FAIRHAUL_BUDGET_"


@dataclass(frozen=True)
class Budgets:
    """Size guards for the exponential-parameter routines.

    Exceeding a budget raises BudgetExceededError; nothing is truncated
    silently. Every field can be overridden by FAIRHAUL_BUDGET_<FIELD>.
    """

    brute_leaves: int = 12
    brute_agents: int = 5
    leaf_dp_leaves: int = 20            # share only
    leaf_dp_witness_leaves: int = 16    # with witness reconstruction
    auto_leaf_dp_leaves: int = 14       # threshold used by auto dispatch
    ilp_junctions: int = 4
    ilp_weights: int = 3
    ilp_states: int = 1_000_000
    star_agents: int = 4
    star_max_weight: int = 100
    star_states: int = 2_000_000

    @classmethod
    def from_env(cls, environ=None) -> "Budgets":
        environ = os.environ if environ is None else environ
        overrides = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is not None:
                overrides[f.name] = int(raw)
        return cls(**overrides)

    def replace(self, **kw) -> "Budgets":
        return replace(self, **kw)


# ---------------------------------------------------------------------------
# hub-on-a-dead-end normalization

def _peel(instance: Instance) -> tuple[Instance, Fraction, list[str]]:
    """Re-root while the hub is a dead end.

    Returns (reduced instance, accumulated offset, freed orders). Each
    peeled step deletes the hub and promotes its single neighbour; the
    promoted vertices are original orders that the reduced instance no
    longer contains, recorded in peel order for witness lifting.
    """
    inst = instance
    offset = Fraction(0)
    freed: list[str] = []
    while True:
        top = inst.topology
        hub_children = top.children_index[top.hub_index]
        if top.m == 0 or len(hub_children) != 1:
            return inst, offset, freed
        child = hub_children[0]
        offset += top.parent_weight[child]
        new_hub = top.vertex_ids[child]
        old_hub = top.hub
        edges = [e for e in top.edges() if old_hub not in (e[0], e[1])]
        inst = Instance(Topology(edges, new_hub), inst.agents)
        freed.append(new_hub)


def preprocess_hub_leaf(instance: Instance) -> tuple[Instance, Fraction]:
    """Normalize to a non-dead-end hub (or a single vertex).

    The share of the original equals the share of the reduced instance
    plus the returned offset; witnesses lift by handing the freed chain to
    any agent with a nonempty bundle.
    """
    reduced, offset, _ = _peel(instance)
    return reduced, offset


def _lift_assignment(
    assignment: dict[str, int], freed: list[str]
) -> dict[str, int]:
    out = dict(assignment)
    carrier = min(out.values(), default=1)
    for v in freed:
        out[v] = carrier
    return out


def _finalize(
    original: Instance,
    share_reduced: Fraction,
    leaf_or_full: Allocation | None,
    offset: Fraction,
    freed: list[str],
    algorithm: str,
    stats: dict[str, int],
) -> SolveReport:
    witness = None
    if leaf_or_full is not None:
        witness = Allocation(_lift_assignment(leaf_or_full.assignment, freed))
    report = SolveReport(share_reduced + offset, witness, algorithm, stats)
    validate_report(original, report)
    return report


def _trivial_report(
    original: Instance, offset: Fraction, freed: list[str], algorithm: str
) -> SolveReport:
    return _finalize(
        original, Fraction(0), Allocation({}), offset, freed, algorithm, {}
    )


# ---------------------------------------------------------------------------
# paths

def solve_path(instance: Instance, budgets: Budgets | None = None) -> SolveReport:
    """Paths, weighted allowed. With two or more agents each arm goes to one
    agent, so the share is the distance to the farthest dead end; a single
    agent walks the whole tree."""
    reduced, offset, freed = _peel(instance)
    top = reduced.topology
    if not structure.is_path(top):
        raise TopologyClassError("topology is not a path")
    if top.m == 0:
        return _trivial_report(instance, offset, freed, "path")
    if reduced.agents == 1:
        witness = Allocation({v: 1 for v in top.order_ids})
        return _finalize(
            instance, top.total_weight, witness, offset, freed, "path", {}
        )
    arms = []
    for child in top.children_index[top.hub_index]:
        orders = top.subtree_order_indices(child)
        weight = sum((top.parent_weight[i] for i in orders), Fraction(0))
        arms.append((weight, [top.vertex_ids[i] for i in orders]))
    arms.sort(key=lambda a: (-a[0], a[1]))
    assignment: dict[str, int] = {}
    for agent0, (_, ids) in enumerate(arms):
        for v in ids:
            assignment[v] = agent0 + 1
    share = arms[0][0]
    return _finalize(
        instance, share, Allocation(assignment), offset, freed, "path", {}
    )


# ---------------------------------------------------------------------------
# stars

def _require_star(top: Topology) -> None:
    if not structure.is_star(top):
        raise TopologyClassError("topology is not a hub-centered star")


def solve_star_unweighted(
    instance: Instance, budgets: Budgets | None = None
) -> SolveReport:
    """Equal-weight stars: the share is ceil(m/n) spokes, witnessed by a
    round-robin assignment."""
    reduced, offset, freed = _peel(instance)
    top = reduced.topology
    if top.m == 0:
        return _trivial_report(instance, offset, freed, "star-unweighted")
    _require_star(top)
    if not top.is_unweighted():
        raise TopologyClassError("star has more than one edge weight")
    w = top.parent_weight[top.order_indices[0]]
    n = reduced.agents
    m = top.m
    share = Fraction(-(-m // n)) * w
    assignment = {
        leaf: (i % n) + 1 for i, leaf in enumerate(sorted(top.leaf_ids))
    }
    return _finalize(
        instance, share, Allocation(assignment), offset, freed,
        "star-unweighted", {},
    )


def solve_star_weighted(
    instance: Instance, budgets: Budgets | None = None
) -> SolveReport:
    """Weighted stars by exact multiway number partitioning.

    The cost function on a star is additive, so minimizing the worst
    bundle is partitioning the spoke weights into n parts minimizing the
    maximum part sum. Reachable load profiles are explored item by item,
    canonicalized as sorted tuples, with backpointers for the witness.
    """
    budgets = budgets or Budgets()
    reduced, offset, freed = _peel(instance)
    top = reduced.topology
    if top.m == 0:
        return _trivial_report(instance, offset, freed, "star-weighted")
    _require_star(top)
    weights, scale = scaled_parent_weights(top)
    pos = order_positions(top)
    items = sorted(
        ((weights[pos[i]], top.vertex_ids[i]) for i in top.order_indices),
        key=lambda t: (-t[0], t[1]),
    )
    n_eff = min(reduced.agents, top.m)
    max_w = max(w for w, _ in items)
    if n_eff > budgets.star_agents or max_w > budgets.star_max_weight:
        raise BudgetExceededError(
            f"weighted-star budget: n={n_eff} (max {budgets.star_agents}), "
            f"max weight {max_w} (max {budgets.star_max_weight})"
        )
    start = (0,) * n_eff
    states: dict[tuple[int, ...], None] = {start: None}
    back: list[dict[tuple[int, ...], tuple[tuple[int, ...], int]]] = []
    for w, _ in items:
        nxt: dict[tuple[int, ...], tuple[tuple[int, ...], int]] = {}
        for state in states:
            for val in set(state):
                lst = list(state)
                lst.remove(val)
                lst.append(val + w)
                key = tuple(sorted(lst))
                if key not in nxt:
                    nxt[key] = (state, val)
        if len(nxt) > budgets.star_states:
            raise BudgetExceededError(
                f"weighted-star state budget: {len(nxt)} > {budgets.star_states}"
            )
        back.append(nxt)
        states = {k: None for k in nxt}
    best = min(states, key=lambda s: (s[-1], s))
    # replay the chain forward to attach items to concrete bins
    chain: list[int] = []
    cur = best
    for step in range(len(items) - 1, -1, -1):
        prev, val = back[step][cur]
        chain.append(val)
        cur = prev
    chain.reverse()
    loads = [0] * n_eff
    assignment: dict[str, int] = {}
    for (w, leaf), val in zip(items, chain):
        b = loads.index(val)
        assignment[leaf] = b + 1
        loads[b] += w
    share = Fraction(best[-1], scale)
    return _finalize(
        instance, share, Allocation(assignment), offset, freed,
        "star-weighted", {"states": sum(len(b) for b in back)},
    )


# ---------------------------------------------------------------------------
# unweighted caterpillars

def _pack_columns(
    cols: list[tuple[int, int]], q: int, cap: int
) -> list[list[tuple[int, int]]] | None:
    """Greedy far-to-near packing of caterpillar columns.

    ``cols`` holds (dist, pending leaves) pairs ordered from the far end
    toward the hub; spine vertices impose no constraint of their own since
    each lies on the walk of any deeper leaf. Each bundle opens at the
    farthest pending column and fills toward the hub up to unit budget q.
    Returns per-bundle [(col, taken)] plans using the fewest bundles, or
    None when ``cap`` bundles do not suffice.
    """
    pending = [c for _, c in cols]
    x = len(cols)
    j = 0
    plans: list[list[tuple[int, int]]] = []
    while j < x:
        if pending[j] == 0:
            j += 1
            continue
        if len(plans) == cap:
            return None
        d = cols[j][0]
        if d > q:
            return None
        c = d
        take: list[tuple[int, int]] = []
        while j < x:
            s = q - c
            if pending[j] > s:
                if s > 0:
                    take.append((j, s))
                    pending[j] -= s
                    c = q
                break
            if pending[j]:
                take.append((j, pending[j]))
                c += pending[j]
                pending[j] = 0
            j += 1
        if not take:
            return None  # column at distance exactly q with leaves pending
        plans.append(take)
    return plans


class _CaterpillarView:
    """Column decomposition of an equal-weight caterpillar around its hub.

    A column is one spine vertex together with its pendant leaves; since
    only leaf sets determine costs, a bundle on one side of the hub costs
    (distance of its farthest column) + (number of leaves taken).
    """

    def __init__(self, top: Topology):
        spine = structure.spine_indices(top)
        if spine is None:
            raise TopologyClassError("topology is not a caterpillar")
        if not top.is_unweighted():
            raise TopologyClassError("caterpillar solver requires equal weights")
        if top.hub_index not in spine:
            raise SolverError("hub missing from spine after normalization")
        self.top = top
        self.unit = (
            top.parent_weight[top.order_indices[0]] if top.m else Fraction(1)
        )
        self.spine = spine
        self.hub_pos = spine.index(top.hub_index)
        leaves_of: dict[int, list[str]] = {v: [] for v in spine}
        for leaf in top.leaf_indices:
            leaves_of[top.parent_index[leaf]].append(top.vertex_ids[leaf])
        for ids in leaves_of.values():
            ids.sort()
        self.leaves_of = leaves_of

    def arm(self, positions: list[int]) -> list[tuple[int, int, list[str]]]:
        """(dist, count, leaf ids) per spine position, far end first."""
        out = []
        for sp in positions:
            v = self.spine[sp]
            ids = self.leaves_of[v]
            out.append((self.top.depth_hops[v], len(ids), ids))
        return out


def _assign_from_plans(
    arm: list[tuple[int, int, list[str]]],
    plans: list[list[tuple[int, int]]],
    first_agent: int,
    assignment: dict[str, int],
) -> int:
    """Materialize packing plans into leaf ids; returns the next free agent."""
    used = [0] * len(arm)
    agent = first_agent
    for plan in plans:
        for col, taken in plan:
            ids = arm[col][2]
            for leaf in ids[used[col]:used[col] + taken]:
                assignment[leaf] = agent
            used[col] += taken
        agent += 1
    return agent


def _cat_one_sided(view: _CaterpillarView, n: int, q: int) -> dict[str, int] | None:
    """Decision when the hub is an endpoint of the spine."""
    x = len(view.spine)
    if view.hub_pos == x - 1:
        positions = list(range(x))
    else:
        positions = list(range(x - 1, -1, -1))
    arm = view.arm(positions)
    plans = _pack_columns([(d, c) for d, c, _ in arm], q, n)
    if plans is None:
        return None
    assignment: dict[str, int] = {}
    _assign_from_plans(arm, plans, 1, assignment)
    return assignment


def _cat_interior(view: _CaterpillarView, n: int, q: int) -> dict[str, int] | None:
    """Decision when the hub sits strictly between two spine arms.

    At most one bundle straddles the hub; it forms an interval of columns
    with partial takes only at its two end columns. Conditioned on that
    bundle, the rest splits into two independent one-sided subproblems;
    leftover hub-column leaves cost one unit on either side and are split
    between the sides exhaustively.
    """
    p = view.hub_pos
    x = len(view.spine)
    left = view.arm(list(range(p)))              # far end first
    right = view.arm(list(range(x - 1, p, -1)))  # far end first
    hub_ids = view.leaves_of[view.spine[p]]
    hub_cnt = len(hub_ids)

    def arm_rest(arm, end_col, end_leftover, hub_extra):
        """Column list for one side after the straddling bundle took its cut."""
        cols = [(d, c) for d, c, _ in arm[:end_col]]
        if end_col < len(arm):
            cols.append((arm[end_col][0], end_leftover))
        cols.append((0, hub_extra))
        return cols

    def try_split(big, l_end, l_left, r_end, r_left, cap):
        """Search hub-leftover splits; returns a full leaf assignment or None."""
        t_h, big_cols, big_cost = big
        if big_cost > q or cap < 0:
            return None
        for to_left in range(hub_cnt - t_h + 1):
            to_right = hub_cnt - t_h - to_left
            lp = _pack_columns(arm_rest(left, l_end, l_left, to_left), q, cap)
            if lp is None:
                continue
            rp = _pack_columns(arm_rest(right, r_end, r_left, to_right), q, cap)
            if rp is None or len(lp) + len(rp) > cap:
                continue
            # materialize: hub pool order = big take, then left extra, right extra
            assignment: dict[str, int] = {}
            pool = list(hub_ids)
            for leaf in pool[:t_h]:
                assignment[leaf] = n
            pool = pool[t_h:]
            for arm, col, taken in big_cols:
                ids = arm[col][2]
                for leaf in ids[len(ids) - taken:]:
                    assignment[leaf] = n

            def side_ids(arm_cols, end_col, end_leftover, extra_pool):
                out = [(d, c, list(ids)) for d, c, ids in arm_cols[:end_col]]
                if end_col < len(arm_cols):
                    d, c, ids = arm_cols[end_col]
                    out.append((d, end_leftover, list(ids[:end_leftover])))
                out.append((0, len(extra_pool), extra_pool))
                return out

            l_ids = side_ids(left, l_end, l_left, pool[:to_left])
            r_ids = side_ids(right, r_end, r_left, pool[to_left:])
            nxt = _assign_from_plans(l_ids, lp, 1, assignment)
            _assign_from_plans(r_ids, rp, nxt, assignment)
            return assignment
        return None

    def suffix(arm, start):
        total = 0
        takes = []
        for col in range(start, len(arm)):
            total += arm[col][1]
            takes.append((arm, col, arm[col][1]))
        return total, takes

    # no straddling bundle
    out = try_split((0, [], 0), len(left), 0, len(right), 0, n)
    if out is not None:
        return out
    # straddling bundle on the hub column only
    for t_h in range(1, hub_cnt + 1):
        out = try_split((t_h, [], t_h), len(left), 0, len(right), 0, n - 1)
        if out is not None:
            return out
    # straddling bundle reaching into the left arm only / right arm only
    for arm, other, flip in ((left, right, False), (right, left, True)):
        for a in range(len(arm)):
            d_a = arm[a][0]
            full, takes = suffix(arm, a + 1)
            for t_a in range(1, arm[a][1] + 1):
                for t_h in range(hub_cnt + 1):
                    cost = d_a + t_a + full + t_h
                    if cost > q:
                        break
                    big = (t_h, [(arm, a, t_a)] + takes, cost)
                    if flip:
                        out = try_split(big, len(other), 0, a, arm[a][1] - t_a, n - 1)
                    else:
                        out = try_split(big, a, arm[a][1] - t_a, len(other), 0, n - 1)
                    if out is not None:
                        return out
    # straddling bundle reaching into both arms: hub column interior, fully taken
    for a in range(len(left)):
        d_a = left[a][0]
        full_l, takes_l = suffix(left, a + 1)
        for b in range(len(right)):
            d_b = right[b][0]
            full_r, takes_r = suffix(right, b + 1)
            base = d_a + d_b + full_l + full_r + hub_cnt
            if base + 2 > q:
                continue
            for t_a in range(1, left[a][1] + 1):
                if base + t_a + 1 > q:
                    break
                for t_b in range(1, right[b][1] + 1):
                    cost = base + t_a + t_b
                    if cost > q:
                        break
                    big_cols = [(left, a, t_a)] + takes_l + [(right, b, t_b)] + takes_r
                    out = try_split(
                        (hub_cnt, big_cols, cost),
                        a, left[a][1] - t_a, b, right[b][1] - t_b, n - 1,
                    )
                    if out is not None:
                        return out
    return None


def solve_caterpillar(
    instance: Instance, budgets: Budgets | None = None
) -> SolveReport:
    """Equal-weight caterpillars: scan candidate shares ascending, deciding
    each with the greedy column-packing routine."""
    reduced, offset, freed = _peel(instance)
    top = reduced.topology
    if top.m == 0:
        return _trivial_report(instance, offset, freed, "caterpillar")
    view = _CaterpillarView(top)
    n = reduced.agents
    lb = max(top.depth_hops[i] for i in top.order_indices)
    stats = {"q_tried": 0}
    interior = 0 < view.hub_pos < len(view.spine) - 1
    for q in range(lb, top.m + 1):
        stats["q_tried"] += 1
        if interior:
            leaf_assignment = _cat_interior(view, n, q)
        else:
            leaf_assignment = _cat_one_sided(view, n, q)
        if leaf_assignment is not None:
            if leaf_assignment and max(leaf_assignment.values()) > n:
                raise SolverError("caterpillar packing used too many agents")
            witness = complete_from_leaves(reduced, leaf_assignment)
            share = Fraction(q) * view.unit
            return _finalize(
                instance, share, witness, offset, freed, "caterpillar", stats
            )
    raise SolverError("caterpillar scan found no feasible share")


# ---------------------------------------------------------------------------
# few dead ends: subset dynamic programming over leaf sets

def solve_leaf_dp(
    instance: Instance, budgets: Budgets | None = None, *, witness: bool = True
) -> SolveReport:
    """Exact share via DP over subsets of dead ends.

    Only leaf ownership determines costs, so the state is (agents used,
    set of leaves already covered); the transition peels off the leaf set
    of one agent. Costs of all 2^L leaf subsets are precomputed
    incrementally in scaled integer arithmetic. Works for any weights.
    """
    budgets = budgets or Budgets()
    reduced, offset, freed = _peel(instance)
    top = reduced.topology
    if top.m == 0:
        return _trivial_report(instance, offset, freed, "leaf-dp")
    leaves = list(top.leaf_indices)
    L = len(leaves)
    limit = budgets.leaf_dp_witness_leaves if witness else budgets.leaf_dp_leaves
    if L > limit:
        raise BudgetExceededError(f"leaf-dp budget: L={L} (max {limit})")
    masks = order_path_masks(top)
    weights, scale = scaled_parent_weights(top)
    leaf_masks = [masks[v] for v in leaves]
    size = 1 << L
    closure_mask = [0] * size
    cost = [0] * size
    for s in range(1, size):
        low = s & -s
        li = low.bit_length() - 1
        prev = s ^ low
        new_bits = leaf_masks[li] & ~closure_mask[prev]
        closure_mask[s] = closure_mask[prev] | leaf_masks[li]
        cost[s] = cost[prev] + mask_weight(new_bits, weights)
    n_eff = min(reduced.agents, L)
    full = size - 1
    g = list(cost)
    choices: list[list[int]] = []
    for _ in range(2, n_eff + 1):
        ch = [0] * size
        g2 = list(g)  # empty bundle for the new agent
        for s in range(1, size):
            low = s & -s
            rest = s ^ low
            best = g[s]
            best_q = 0
            t = rest
            while True:
                qmask = t | low
                cq = cost[qmask]
                if cq < best:
                    other = g[s ^ qmask]
                    val = other if other > cq else cq
                    if val < best:
                        best = val
                        best_q = qmask
                if t == 0:
                    break
                t = (t - 1) & rest
            g2[s] = best
            ch[s] = best_q
        g = g2
        if witness:
            choices.append(ch)
    stats = {
        "table_cells": n_eff * size,
        "transitions": (n_eff - 1) * (3 ** L) // 2 if n_eff > 1 else 0,
    }
    share = Fraction(g[full], scale)
    if not witness:
        report = SolveReport(share + offset, None, "leaf-dp", stats)
        validate_report(instance, report)
        return report
    bundle_masks = [0] * n_eff
    s = full
    for i in range(n_eff - 1, 0, -1):
        qmask = choices[i - 1][s]
        bundle_masks[i] = qmask
        s ^= qmask
    bundle_masks[0] = s
    leaf_assignment: dict[str, int] = {}
    for agent0, bm in enumerate(bundle_masks):
        while bm:
            low = bm & -bm
            leaf_assignment[top.vertex_ids[leaves[low.bit_length() - 1]]] = agent0 + 1
            bm ^= low
    witness_alloc = complete_from_leaves(reduced, leaf_assignment)
    return _finalize(instance, share, witness_alloc, offset, freed, "leaf-dp", stats)


# ---------------------------------------------------------------------------
# few junctions: leaf types plus an integer feasibility search per candidate q

@dataclass(frozen=True)
class LeafType:
    """One equivalence class of dead ends: same parent, same pendant weight."""

    parent: str
    weight: Fraction
    leaves: tuple[str, ...]
    parent_dist: Fraction


@dataclass(frozen=True)
class LeafTypeTable:
    types: tuple[LeafType, ...]
    junctions: int          # junction count of the topology
    distinct_weights: int   # number of distinct edge weights

    def class_sizes(self) -> dict[Fraction, int]:
        out: dict[Fraction, int] = {}
        for t in self.types:
            out[t.weight] = out.get(t.weight, 0) + 1
        return out

    def important_agent_bound(self) -> int:
        return sum(k * (k - 1) // 2 for k in self.class_sizes().values())


def leaf_types(topology: Topology) -> LeafTypeTable:
    groups: dict[tuple[int, Fraction], list[str]] = {}
    for li in topology.leaf_indices:
        key = (topology.parent_index[li], topology.parent_weight[li])
        groups.setdefault(key, []).append(topology.vertex_ids[li])
    types = [
        LeafType(
            parent=topology.vertex_ids[p],
            weight=w,
            leaves=tuple(sorted(ids)),
            parent_dist=topology.dist[p],
        )
        for (p, w), ids in groups.items()
    ]
    types.sort(key=lambda t: (-t.parent_dist, t.weight, t.parent))
    return LeafTypeTable(
        tuple(types),
        structure.junction_count(topology),
        len(topology.distinct_weights()),
    )


@dataclass(frozen=True)
class IlpGuess:
    """Discovered structure of a feasible point: the type sets of agents that
    mix several leaf types within one weight class, and the candidate share."""

    structures: tuple[frozenset[int], ...]
    target: Fraction

    @property
    def important_agents(self) -> int:
        return len(self.structures)

    def validate(self, table: LeafTypeTable, agents: int) -> None:
        if any(not s for s in self.structures):
            raise SolverError("empty bundle structure in guess")
        if self.important_agents > min(table.important_agent_bound(), agents):
            raise SolverError(
                f"{self.important_agents} mixed-type agents exceed the bound"
            )


def _niceify(shapes: list[list[int]], type_weights: list[int]) -> None:
    """Swap same-weight leaves between agent pairs until no two agents share
    two leaf types of the same weight class. Costs never increase."""
    by_w: dict[int, list[int]] = {}
    for idx, w in enumerate(type_weights):
        by_w.setdefault(w, []).append(idx)
    for _ in range(10_000):
        changed = False
        for i in range(len(shapes)):
            for j in range(len(shapes)):
                if i == j:
                    continue
                for tids in by_w.values():
                    shared = [t for t in tids if shapes[i][t] and shapes[j][t]]
                    if len(shared) < 2:
                        continue
                    t1, t2 = shared[0], shared[1]
                    k = min(shapes[i][t2], shapes[j][t1])
                    shapes[i][t2] -= k
                    shapes[j][t2] += k
                    shapes[j][t1] -= k
                    shapes[i][t1] += k
                    changed = True
        if not changed:
            return
    raise SolverError("nice-allocation normalization did not converge")


def solve_internal_ilp(
    instance: Instance, budgets: Budgets | None = None
) -> SolveReport:
    """Exact share for topologies with few junctions and few distinct weights.

    For each candidate share q, decides whether the per-type leaf demands
    can be covered by at most n bundles whose cost fits q. A bundle is a
    count per leaf type plus the exact weight of the union of the hub
    paths of the types it touches; the decision is a depth-first search
    over bundle shapes memoized on the residual demand vector. Candidate
    values are scanned ascending over the achievable cost grid when all
    weights are equal, and located by binary search on the scaled integer
    range otherwise.
    """
    budgets = budgets or Budgets()
    reduced, offset, freed = _peel(instance)
    top = reduced.topology
    if top.m == 0:
        return _trivial_report(instance, offset, freed, "internal-ilp")
    table = leaf_types(top)
    if table.junctions > budgets.ilp_junctions:
        raise BudgetExceededError(
            f"junction budget: k={table.junctions} (max {budgets.ilp_junctions})"
        )
    if table.distinct_weights > budgets.ilp_weights:
        raise BudgetExceededError(
            f"weight budget: psi={table.distinct_weights} (max {budgets.ilp_weights})"
        )
    weights, scale = scaled_parent_weights(top)
    masks = order_path_masks(top)
    tcount = len(table.types)
    t_w = [int(t.weight * scale) for t in table.types]
    t_cnt = [len(t.leaves) for t in table.types]
    t_path = [masks[top.index(t.parent)] for t in table.types]
    state_space = math.prod(c + 1 for c in t_cnt)
    if state_space > budgets.ilp_states:
        raise BudgetExceededError(
            f"residual-state budget: {state_space} > {budgets.ilp_states}"
        )
    n = reduced.agents
    lb = max(int(top.dist[i] * scale) for i in top.order_indices)
    ub = int(top.total_weight * scale)
    stats = {"q_tried": 0, "memo_states": 0, "shape_nodes": 0}
    infeasible = n + 1

    def feasible(q: int) -> list[tuple[int, ...]] | None:
        stats["q_tried"] += 1
        memo: dict[tuple[int, ...], tuple[int, tuple[int, ...] | None]] = {}

        def min_bundles(residual: tuple[int, ...]) -> tuple[int, tuple[int, ...] | None]:
            hit = memo.get(residual)
            if hit is not None:
                return hit
            t0 = -1
            for idx, r in enumerate(residual):
                if r:
                    t0 = idx
                    break
            if t0 < 0:
                memo[residual] = (0, None)
                return memo[residual]
            best = [infeasible, None]
            shape = [0] * tcount

            def rec(i: int, trunk_mask: int, trunk_w: int, leaf_w: int) -> None:
                stats["shape_nodes"] += 1
                if i == tcount:
                    rest = tuple(r - s for r, s in zip(residual, shape))
                    sub = min_bundles(rest)[0]
                    if 1 + sub < best[0]:
                        best[0] = 1 + sub
                        best[1] = tuple(shape)
                    return
                if i != t0:
                    rec(i + 1, trunk_mask, trunk_w, leaf_w)
                r = residual[i]
                if r:
                    new_bits = t_path[i] & ~trunk_mask
                    ntrunk = trunk_w + mask_weight(new_bits, weights)
                    base = ntrunk + leaf_w
                    w = t_w[i]
                    c = 1
                    while c <= r and base + c * w <= q:
                        shape[i] = c
                        rec(i + 1, trunk_mask | new_bits, ntrunk, leaf_w + c * w)
                        c += 1
                    shape[i] = 0

            rec(t0, 0, 0, 0)
            memo[residual] = (best[0], best[1])
            return memo[residual]

        total = tuple(t_cnt)
        used, _ = min_bundles(total)
        stats["memo_states"] += len(memo)
        if used > n:
            return None
        shapes = []
        cur = total
        while any(cur):
            _, shp = memo[cur]
            if shp is None:
                raise SolverError("missing shape during reconstruction")
            shapes.append(shp)
            cur = tuple(r - s for r, s in zip(cur, shp))
        return shapes

    if top.is_unweighted():
        step = weights[0]
        q = lb
        shapes = None
        while q <= ub:
            shapes = feasible(q)
            if shapes is not None:
                break
            q += step
        if shapes is None:
            raise SolverError("no feasible share found on the candidate grid")
    else:
        lo, hi = lb, ub
        while lo < hi:
            mid = (lo + hi) // 2
            if feasible(mid) is not None:
                hi = mid
            else:
                lo = mid + 1
        q = lo
        shapes = feasible(q)
        if shapes is None:
            raise SolverError("binary search converged on an infeasible value")

    agent_shapes = [list(s) for s in shapes]
    _niceify(agent_shapes, t_w)
    pools = [list(t.leaves) for t in table.types]
    leaf_assignment: dict[str, int] = {}
    for agent0, shape in enumerate(agent_shapes):
        for t, c in enumerate(shape):
            for leaf in pools[t][:c]:
                leaf_assignment[leaf] = agent0 + 1
            pools[t] = pools[t][c:]
    share = Fraction(q, scale)
    witness = complete_from_leaves(reduced, leaf_assignment)
    weight_classes: dict[int, list[int]] = {}
    for idx, w in enumerate(t_w):
        weight_classes.setdefault(w, []).append(idx)
    structures = []
    for shape in agent_shapes:
        support = frozenset(t for t, c in enumerate(shape) if c)
        if any(
            len([t for t in tids if t in support]) >= 2
            for tids in weight_classes.values()
        ):
            structures.append(support)
    guess = IlpGuess(tuple(structures), share + offset)
    guess.validate(table, n)
    stats["eta"] = guess.important_agents
    return _finalize(instance, share, witness, offset, freed, "internal-ilp", stats)


# ---------------------------------------------------------------------------
# corridor contraction guided by a minimum 3-path vertex cover

@dataclass
class TreeReduction:
    """Mapping between an instance and its corridor-contracted form."""

    original: Instance
    reduced: Instance
    carrier: dict[str, str]  # removed order -> surviving descendant endpoint

    def lift(self, alloc: Allocation) -> Allocation:
        assignment = dict(alloc.assignment)
        for gone, keeper in self.carrier.items():
            assignment[gone] = assignment[keeper]
        full = Allocation(assignment)
        return repair_to_nonwasteful(self.original, full)


def reduce_3pvc(instance: Instance) -> tuple[Instance, TreeReduction]:
    """Contract corridors so that few internal vertices remain.

    Takes a minimum 3-path vertex cover that avoids dead ends, augments it
    with the vertices wedged between cover members, then merges every
    remaining single-child order into its parent edge (summing weights).
    The share is preserved exactly: contractions never change any
    hub-path weight or the leaf set. Allocations lift back by handing each
    merged order to the agent of the surviving lower endpoint, then
    repairing.
    """
    top = instance.topology
    if top.m == 0:
        return instance, TreeReduction(instance, instance, {})
    cover = {top.index(v) for v in structure.min_three_pvc(top)}
    keep = set(cover)
    keep.add(top.hub_index)
    for v in top.order_indices:
        if v in cover:
            continue
        if top.parent_index[v] in cover and any(
            c in cover for c in top.children_index[v]
        ):
            keep.add(v)
    removable = {
        v
        for v in top.order_indices
        if v not in keep and len(top.children_index[v]) == 1
    }
    carrier: dict[str, str] = {}
    edges = []
    for v in range(len(top.vertex_ids)):
        if v == top.hub_index or v in removable:
            continue
        u = top.parent_index[v]
        wsum = top.parent_weight[v]
        while u in removable:
            carrier[top.vertex_ids[u]] = top.vertex_ids[v]
            wsum += top.parent_weight[u]
            u = top.parent_index[u]
        edges.append((top.vertex_ids[v], top.vertex_ids[u], wsum))
    reduced = Instance(Topology(edges, top.hub), instance.agents)
    return reduced, TreeReduction(instance, reduced, carrier)


# ---------------------------------------------------------------------------
# front door

ALGORITHMS = ("auto", "brute", "leaf-dp", "internal-ilp", "star", "caterpillar", "path")


def solve(
    instance: Instance,
    algorithm: str = "auto",
    budgets: Budgets | None = None,
) -> SolveReport:
    """Compute the share and a non-wasteful witness, picking the cheapest
    applicable routine: path, star, caterpillar (equal weights), leaf DP
    for few dead ends, the leaf-type search for few junctions, corridor
    contraction feeding the latter, and finally brute force."""
    budgets = budgets or Budgets()
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    if algorithm == "brute":
        return brute_force_mms(
            instance,
            max_leaves=budgets.brute_leaves,
            max_agents=budgets.brute_agents,
        )
    if algorithm == "leaf-dp":
        return solve_leaf_dp(instance, budgets)
    if algorithm == "internal-ilp":
        return solve_internal_ilp(instance, budgets)
    if algorithm == "path":
        return solve_path(instance, budgets)
    if algorithm == "caterpillar":
        return solve_caterpillar(instance, budgets)
    if algorithm == "star":
        reduced, _, _ = _peel(instance)
        if reduced.topology.is_unweighted():
            return solve_star_unweighted(instance, budgets)
        return solve_star_weighted(instance, budgets)

    reduced, _, _ = _peel(instance)
    top = reduced.topology
    skips: list[str] = []
    if structure.is_path(top):
        return solve_path(instance, budgets)
    if structure.is_star(top):
        if top.is_unweighted():
            return solve_star_unweighted(instance, budgets)
        try:
            return solve_star_weighted(instance, budgets)
        except BudgetExceededError as exc:
            skips.append(f"star-weighted: {exc}")
    if top.is_unweighted() and structure.is_caterpillar(top):
        return solve_caterpillar(instance, budgets)
    if len(top.leaf_indices) <= budgets.auto_leaf_dp_leaves:
        return solve_leaf_dp(instance, budgets)
    try:
        return solve_internal_ilp(instance, budgets)
    except BudgetExceededError as exc:
        skips.append(f"internal-ilp: {exc}")
    try:
        contracted, reduction = reduce_3pvc(instance)
        inner = solve_internal_ilp(contracted, budgets)
        witness = reduction.lift(inner.allocation) if inner.allocation else None
        report = SolveReport(inner.share, witness, "3pvc+internal-ilp", inner.stats)
        validate_report(instance, report)
        return report
    except BudgetExceededError as exc:
        skips.append(f"3pvc+internal-ilp: {exc}")
    try:
        return brute_force_mms(
            instance,
            max_leaves=budgets.brute_leaves,
            max_agents=budgets.brute_agents,
        )
    except BudgetExceededError as exc:
        skips.append(f"brute: {exc}")
    # last resort: the leaf DP at its hard budget, beyond the auto threshold
    try:
        return solve_leaf_dp(instance, budgets)
    except BudgetExceededError as exc:
        skips.append(f"leaf-dp: {exc}")
    raise BudgetExceededError("all solvers over budget: " + "; ".join(skips))


def decide_share_at_most(
    instance: Instance, q, budgets: Budgets | None = None
) -> bool:
    """True iff the instance admits an allocation whose worst bundle cost is
    at most q."""
    bound = q if isinstance(q, Fraction) else Fraction(q)
    return solve(instance, budgets=budgets).share <= bound
