"""Structural classification of topologies and the tree 3-path-vertex-cover DP.

These parameters drive solver dispatch: path/star/caterpillar detection,
leaf and junction counts, distinct-weight count, depth, diameter, and the
dissociation number (minimum 3-path vertex cover).
"""
from __future__ import annotations

from .model import Instance, Topology

_INF = float("inf")


def is_path(topology: Topology) -> bool:
    """True when every vertex has degree at most two."""
    return all(topology.degree(v) <= 2 for v in topology.vertex_ids)


def is_star(topology: Topology) -> bool:
    """True when every order is directly adjacent to the hub."""
    hub = topology.hub_index
    return all(topology.parent_index[i] == hub for i in topology.order_indices)


def spine_indices(topology: Topology) -> list[int] | None:
    """The non-leaf vertices ordered along their path, or None if they
    do not form a path (i.e. the tree is not a caterpillar)."""
    deg = {
        i: len(topology.children_index[i]) + (0 if i == topology.hub_index else 1)
        for i in range(len(topology.vertex_ids))
    }
    spine = [i for i, d in deg.items() if d >= 2]
    if not spine:
        return []
    spine_set = set(spine)
    neigh: dict[int, list[int]] = {i: [] for i in spine}
    for i in spine:
        p = topology.parent_index[i]
        if p >= 0 and p in spine_set:
            neigh[i].append(p)
            neigh[p].append(i)
    for i in spine:
        if len(neigh[i]) > 2:
            return None
    ends = [i for i in spine if len(neigh[i]) <= 1]
    # non-leaf vertices of a tree always induce a subtree; a path has <= 2 ends
    if len(spine) == 1:
        return spine
    if len(ends) != 2:
        return None
    ordered = [ends[0]]
    prev = -1
    cur = ends[0]
    while True:
        nxt = [u for u in neigh[cur] if u != prev]
        if not nxt:
            break
        prev, cur = cur, nxt[0]
        ordered.append(cur)
    return ordered if len(ordered) == len(spine) else None


def is_caterpillar(topology: Topology) -> bool:
    return spine_indices(topology) is not None


def depth(topology: Topology) -> int:
    """Maximum hop depth of any vertex below the hub."""
    return max(topology.depth_hops, default=0)


def diameter(topology: Topology) -> int:
    """Longest hop distance between any two vertices."""
    if topology.m == 0:
        return 0

    def farthest(start: int) -> tuple[int, int]:
        children = topology.children_index
        parent = topology.parent_index
        best = (0, start)
        stack = [(start, -1, 0)]
        while stack:
            v, frm, d = stack.pop()
            if d > best[0]:
                best = (d, v)
            for u in children[v]:
                if u != frm:
                    stack.append((u, v, d + 1))
            p = parent[v]
            if p >= 0 and p != frm:
                stack.append((p, v, d + 1))
        return best

    _, far = farthest(topology.hub_index)
    d, _ = farthest(far)
    return d


def junction_count(topology: Topology) -> int:
    """Vertices that act as junctions: internal orders plus leaf parents.

    This is the parameter that bounds the leaf-type machinery; the hub
    counts only when a leaf hangs directly off it.
    """
    internal_orders = {
        i for i in topology.order_indices if topology.children_index[i]
    }
    leaf_parents = {topology.parent_index[i] for i in topology.leaf_indices}
    return len(internal_orders | leaf_parents)


# ---------------------------------------------------------------------------
# minimum 3-path vertex cover (dissociation number complement)

def min_three_pvc(topology: Topology) -> frozenset[str]:
    """A minimum vertex set whose removal leaves maximum degree one.

    Among minimum covers, prefers one containing no tree leaf (such an
    optimum always exists on trees); ties broken deterministically.
    States per vertex: IN the cover; OUT with zero kept edges to children;
    OUT with exactly one kept child edge (the parent must then be IN).
    Costs are (size, leaves covered) pairs minimized lexicographically.
    """
    if topology.m == 0:
        return frozenset()
    children = topology.children_index
    hub = topology.hub_index
    is_leaf = [False] * len(topology.vertex_ids)
    for v in range(len(topology.vertex_ids)):
        if topology.degree(topology.vertex_ids[v]) == 1:
            is_leaf[v] = True

    IN, OUT0, OUT1 = 0, 1, 2
    cost: dict[int, list] = {}
    pick: dict[int, list] = {}

    postorder = []
    stack = [hub]
    while stack:
        v = stack.pop()
        postorder.append(v)
        stack.extend(children[v])
    postorder.reverse()

    for v in postorder:
        leaf_pen = 1 if is_leaf[v] else 0
        if not children[v]:
            cost[v] = [(1, leaf_pen), (0, 0), (_INF, _INF)]
            pick[v] = [[], [], []]
            continue
        best_any = []      # per child: min over all states (for v IN)
        in_only = []       # per child: the IN cost (for v OUT0)
        for c in children[v]:
            options = cost[c]
            state = min(range(3), key=lambda s: options[s])
            best_any.append((state, options[state]))
            in_only.append(options[IN])
        c_in = (1 + sum(b[1][0] for b in best_any),
               leaf_pen + sum(b[1][1] for b in best_any))
        c_out0 = (sum(x[0] for x in in_only), sum(x[1] for x in in_only))
        # OUT1: one child kept OUT0, the rest IN
        c_out1 = (_INF, _INF)
        out1_child = -1
        for idx, c in enumerate(children[v]):
            cand = (
                c_out0[0] - in_only[idx][0] + cost[c][OUT0][0],
                c_out0[1] - in_only[idx][1] + cost[c][OUT0][1],
            )
            if cand < c_out1:
                c_out1 = cand
                out1_child = idx
        cost[v] = [c_in, c_out0, c_out1]
        pick[v] = [
            [b[0] for b in best_any],
            [IN] * len(children[v]),
            [OUT0 if idx == out1_child else IN for idx in range(len(children[v]))],
        ]

    root_state = min(range(3), key=lambda s: cost[hub][s])
    cover: set[str] = set()
    stack2 = [(hub, root_state)]
    while stack2:
        v, state = stack2.pop()
        if state == IN:
            cover.add(topology.vertex_ids[v])
        for c, cs in zip(children[v], pick[v][state]):
            stack2.append((c, cs))
    return frozenset(cover)


def three_pvc_number(topology: Topology) -> int:
    return len(min_three_pvc(topology))


def classify(instance: Instance) -> dict:
    """Structural parameters of an instance, as reported by the CLI."""
    top = instance.topology
    return {
        "is_path": is_path(top),
        "is_star": is_star(top),
        "is_caterpillar": is_caterpillar(top),
        "m": top.m,
        "n": instance.agents,
        "L": len(top.leaf_ids),
        "k": junction_count(top),
        "psi": len(top.distinct_weights()),
        "three_pvc": three_pvc_number(top),
        "depth": depth(top),
        "diameter": diameter(top),
    }
