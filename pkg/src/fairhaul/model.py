"""Core data model: tree topologies with a hub, instances, allocations, walk costs.

Vertices are opaque string identifiers in files and at the API surface;
internally every vertex gets a dense integer index for O(1) array access.
All weights and costs are exact rationals (`fractions.Fraction`); solver
logic never touches floating point.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    AllocationFormatError,
    AllocationMismatchError,
    InstanceFormatError,
)


# ---------------------------------------------------------------------------
# weights

def parse_weight(raw) -> Fraction:
    """Parse an edge weight from a JSON value (int, float, or string).

    Strings may be integers ("3"), decimals ("2.5"), or ratios ("7/3").
    """
    try:
        if isinstance(raw, bool):
            raise ValueError("boolean is not a weight")
        if isinstance(raw, int):
            w = Fraction(raw)
        elif isinstance(raw, float):
            w = Fraction(str(raw))
        elif isinstance(raw, str):
            w = Fraction(raw.strip())
        else:
            raise ValueError(f"unsupported weight type {type(raw).__name__}")
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceFormatError("bad-weight", f"cannot parse weight {raw!r}: {exc}") from None
    if w <= 0:
        raise InstanceFormatError("bad-weight", f"weight must be positive, got {w}")
    return w


def format_weight(w: Fraction):
    """Canonical JSON form of a weight: int, decimal string, or 'p/q' string."""
    if w.denominator == 1:
        return int(w)
    den = w.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        exp = max(twos, fives)
        digits = str(w.numerator * 10 ** exp // w.denominator).rjust(exp + 1, "0")
        return digits[:-exp] + "." + digits[-exp:]
    return f"{w.numerator}/{w.denominator}"


# ---------------------------------------------------------------------------
# topology

class Topology:
    """An edge-weighted tree with a designated hub vertex.

    Immutable after construction. Derived data (parents, distances, leaf
    set) is computed once by a traversal from the hub.

    Attributes:
        hub: identifier of the hub vertex.
        vertex_ids: all vertex identifiers, sorted.
        order_ids: all non-hub vertex identifiers, sorted.
        leaf_ids: orders without children (the dead ends), sorted.
    """

    __slots__ = (
        "hub", "vertex_ids", "order_ids", "leaf_ids",
        "hub_index", "parent_index", "parent_weight", "children_index",
        "dist", "depth_hops", "order_indices", "leaf_indices",
        "total_weight", "_index",
    )

    def __init__(self, edges: Iterable[tuple[str, str, Fraction]], hub: str):
        edge_list = []
        seen_pairs = set()
        vertices: set[str] = set()
        for u, v, w in edges:
            u, v = str(u), str(v)
            if u == v:
                raise InstanceFormatError("not-a-tree", f"self-loop at {u!r}")
            pair = (u, v) if u < v else (v, u)
            if pair in seen_pairs:
                raise InstanceFormatError("duplicate-edge", f"edge {pair} listed twice")
            seen_pairs.add(pair)
            if not isinstance(w, Fraction):
                w = parse_weight(w)
            elif w <= 0:
                raise InstanceFormatError("bad-weight", f"weight must be positive, got {w}")
            edge_list.append((u, v, w))
            vertices.add(u)
            vertices.add(v)
        if not edge_list:
            vertices = {hub}  # the edgeless tree: a lone hub, zero orders
        elif hub not in vertices:
            raise InstanceFormatError("unknown-hub", f"hub {hub!r} not in vertex set")
        if len(edge_list) != len(vertices) - 1:
            raise InstanceFormatError(
                "not-a-tree",
                f"{len(vertices)} vertices need {len(vertices) - 1} edges, got {len(edge_list)}",
            )

        ids = tuple(sorted(vertices))
        index = {vid: i for i, vid in enumerate(ids)}
        adj: list[list[tuple[int, Fraction]]] = [[] for _ in ids]
        for u, v, w in edge_list:
            ui, vi = index[u], index[v]
            adj[ui].append((vi, w))
            adj[vi].append((ui, w))

        hub_index = index[hub]
        n_vert = len(ids)
        parent = [-2] * n_vert
        parent_w = [Fraction(0)] * n_vert
        dist = [Fraction(0)] * n_vert
        depth = [0] * n_vert
        parent[hub_index] = -1
        stack = [hub_index]
        visited = 1
        order_of_visit = []
        while stack:
            v = stack.pop()
            order_of_visit.append(v)
            for u, w in adj[v]:
                if parent[u] == -2:
                    parent[u] = v
                    parent_w[u] = w
                    dist[u] = dist[v] + w
                    depth[u] = depth[v] + 1
                    stack.append(u)
                    visited += 1
        if visited != n_vert:
            raise InstanceFormatError("not-a-tree", "graph is disconnected or cyclic")

        children: list[list[int]] = [[] for _ in ids]
        for v in range(n_vert):
            p = parent[v]
            if p >= 0:
                children[p].append(v)
        for c in children:
            c.sort()  # index order == id order; deterministic traversals

        self.hub = hub
        self.vertex_ids = ids
        self._index = index
        self.hub_index = hub_index
        self.parent_index = tuple(parent)
        self.parent_weight = tuple(parent_w)
        self.children_index = tuple(tuple(c) for c in children)
        self.dist = tuple(dist)
        self.depth_hops = tuple(depth)
        self.order_indices = tuple(i for i in range(n_vert) if i != hub_index)
        self.order_ids = tuple(ids[i] for i in self.order_indices)
        self.leaf_indices = tuple(
            i for i in self.order_indices if not children[i]
        )
        self.leaf_ids = tuple(ids[i] for i in self.leaf_indices)
        self.total_weight = sum(parent_w, Fraction(0))

    # -- simple queries ----------------------------------------------------

    @property
    def m(self) -> int:
        """Number of orders (non-hub vertices)."""
        return len(self.order_ids)

    def index(self, vertex: str) -> int:
        try:
            return self._index[vertex]
        except KeyError:
            raise ValueError(f"unknown vertex {vertex!r}") from None

    def has_vertex(self, vertex: str) -> bool:
        return vertex in self._index

    def degree(self, vertex: str) -> int:
        i = self.index(vertex)
        return len(self.children_index[i]) + (0 if i == self.hub_index else 1)

    def distinct_weights(self) -> frozenset[Fraction]:
        return frozenset(
            self.parent_weight[i] for i in self.order_indices
        )

    def is_unweighted(self) -> bool:
        """True when all edge weights are equal (includes the edgeless tree)."""
        return len(self.distinct_weights()) <= 1

    def edges(self) -> tuple[tuple[str, str, Fraction], ...]:
        """Canonical edge list: endpoint pairs sorted, list sorted."""
        out = []
        for i in self.order_indices:
            p = self.parent_index[i]
            u, v = self.vertex_ids[i], self.vertex_ids[p]
            if v < u:
                u, v = v, u
            out.append((u, v, self.parent_weight[i]))
        return tuple(sorted(out))

    def subtree_order_indices(self, root: int) -> list[int]:
        """Indices of all orders in the subtree hanging below ``root`` (inclusive)."""
        out = []
        stack = [root]
        while stack:
            v = stack.pop()
            if v != self.hub_index:
                out.append(v)
            stack.extend(self.children_index[v])
        return out

    def verify_invariants(self) -> None:
        """Recompute the derived caches from scratch and compare. Test hook."""
        fresh = Topology(self.edges(), self.hub)
        assert fresh.vertex_ids == self.vertex_ids
        assert fresh.parent_index == self.parent_index
        assert fresh.dist == self.dist
        assert fresh.leaf_ids == self.leaf_ids

    def __eq__(self, other):
        return (
            isinstance(other, Topology)
            and self.hub == other.hub
            and self.edges() == other.edges()
        )

    def __hash__(self):
        return hash((self.hub, self.edges()))

    def __repr__(self):
        return f"Topology(hub={self.hub!r}, m={self.m})"


@dataclass(frozen=True)
class Instance:
    """A topology together with the number of available agents."""

    topology: Topology
    agents: int

    def __post_init__(self):
        if not isinstance(self.agents, int) or isinstance(self.agents, bool) or self.agents < 1:
            raise InstanceFormatError("bad-agents", f"agent count must be >= 1, got {self.agents!r}")

    @property
    def m(self) -> int:
        return self.topology.m

    def __repr__(self):
        return f"Instance(m={self.m}, agents={self.agents}, hub={self.topology.hub!r})"


class Allocation:
    """A total assignment of orders to agents (1-based agent indices).

    >>> top = Topology([("h", "a", 1), ("a", "b", 1)], "h")
    >>> inst = Instance(top, 2)
    >>> alloc = Allocation({"a": 1, "b": 1})
    >>> alloc.bundle(1) == frozenset({"a", "b"})
    True
    """

    __slots__ = ("assignment",)

    def __init__(self, assignment: Mapping[str, int]):
        self.assignment = dict(assignment)

    def __getitem__(self, order: str) -> int:
        return self.assignment[order]

    def __eq__(self, other):
        return isinstance(other, Allocation) and self.assignment == other.assignment

    def __hash__(self):
        return hash(frozenset(self.assignment.items()))

    def __repr__(self):
        return f"Allocation({self.assignment!r})"

    def items(self):
        return self.assignment.items()

    def bundle(self, agent: int) -> frozenset[str]:
        return frozenset(v for v, a in self.assignment.items() if a == agent)

    def bundles(self, agents: int) -> list[frozenset[str]]:
        out: list[set[str]] = [set() for _ in range(agents)]
        for v, a in self.assignment.items():
            out[a - 1].add(v)
        return [frozenset(b) for b in out]

    def validate(self, instance: Instance) -> None:
        """Raise AllocationMismatchError unless this is total and in range."""
        orders = set(instance.topology.order_ids)
        assigned = set(self.assignment)
        if assigned != orders:
            missing = sorted(orders - assigned)[:3]
            extra = sorted(assigned - orders)[:3]
            raise AllocationMismatchError(
                f"allocation domain mismatch (missing={missing}, extra={extra})"
            )
        for v, a in self.assignment.items():
            if not isinstance(a, int) or isinstance(a, bool) or not 1 <= a <= instance.agents:
                raise AllocationMismatchError(
                    f"order {v!r} assigned to invalid agent {a!r} (n={instance.agents})"
                )


@dataclass
class SolveReport:
    """Result of a share computation: the value, a witness, and counters."""

    share: Fraction
    allocation: Allocation | None
    algorithm: str
    stats: dict[str, int] = field(default_factory=dict)

    def to_json_dict(self, include_allocation: bool = True) -> dict:
        out = {
            "share": str(self.share),
            "algorithm": self.algorithm,
            "stats": dict(sorted(self.stats.items())),
        }
        if include_allocation and self.allocation is not None:
            out["allocation"] = dict(sorted(self.allocation.assignment.items()))
        return out


# ---------------------------------------------------------------------------
# cost function

def dist_to_hub(topology: Topology, vertex: str) -> Fraction:
    """Total weight of the unique hub-to-vertex path; 0 for the hub itself."""
    return topology.dist[topology.index(vertex)]


def _check_orders(topology: Topology, orders: Iterable[str]) -> list[int]:
    idxs = []
    for v in orders:
        i = topology.index(v)
        if i == topology.hub_index:
            raise ValueError(f"hub {v!r} is not an order")
        idxs.append(i)
    return idxs


def closure(topology: Topology, orders: Iterable[str]) -> frozenset[str]:
    """All orders lying on some hub path of the given set: its hub-connected hull."""
    marked: set[int] = set()
    for i in _check_orders(topology, orders):
        while i != topology.hub_index and i not in marked:
            marked.add(i)
            i = topology.parent_index[i]
    return frozenset(topology.vertex_ids[i] for i in marked)


def bundle_cost(topology: Topology, orders: Iterable[str]) -> Fraction:
    """Cost of servicing a set of orders from the hub.

    Equals the total weight of the minimal subtree spanning the set plus the
    hub, i.e. half the length of the shortest closed walk that visits every
    order in the set.
    """
    marked: set[int] = set()
    total = Fraction(0)
    for i in _check_orders(topology, orders):
        while i != topology.hub_index and i not in marked:
            marked.add(i)
            total += topology.parent_weight[i]
            i = topology.parent_index[i]
    return total


def allocation_costs(instance: Instance, alloc: Allocation) -> list[Fraction]:
    """Per-agent bundle costs, indexed by agent - 1. Empty bundles cost 0."""
    alloc.validate(instance)
    top = instance.topology
    by_agent: dict[int, list[int]] = {}
    for v, agent in alloc.assignment.items():
        by_agent.setdefault(agent, []).append(top.index(v))
    marked = [0] * len(top.vertex_ids)
    totals = [Fraction(0)] * instance.agents
    for agent in sorted(by_agent):
        for i in by_agent[agent]:
            while i != top.hub_index and marked[i] != agent:
                marked[i] = agent
                totals[agent - 1] += top.parent_weight[i]
                i = top.parent_index[i]
    return totals


# ---------------------------------------------------------------------------
# shared low-level helpers (used by solver kernels)

def order_positions(topology: Topology) -> dict[int, int]:
    """Map vertex index -> dense position in ``order_indices``."""
    return {v: pos for pos, v in enumerate(topology.order_indices)}


def order_path_masks(topology: Topology) -> list[int]:
    """For each vertex index, a bitmask over order positions of its hub path."""
    pos = order_positions(topology)
    masks = [0] * len(topology.vertex_ids)
    stack = list(topology.children_index[topology.hub_index])
    while stack:
        v = stack.pop()
        masks[v] = masks[topology.parent_index[v]] | (1 << pos[v])
        stack.extend(topology.children_index[v])
    return masks


def scaled_parent_weights(topology: Topology) -> tuple[list[int], int]:
    """Integer parent-edge weights per order position, plus the common scale."""
    scale = 1
    for i in topology.order_indices:
        scale = math.lcm(scale, topology.parent_weight[i].denominator)
    weights = [
        int(topology.parent_weight[i] * scale) for i in topology.order_indices
    ]
    return weights, scale


def mask_weight(mask: int, weights: list[int]) -> int:
    """Sum of scaled weights over the set bits of an order mask."""
    total = 0
    while mask:
        low = mask & -mask
        total += weights[low.bit_length() - 1]
        mask ^= low
    return total


# ---------------------------------------------------------------------------
# file formats

def parse_instance(text: bytes | str) -> Instance:
    """Parse and validate an instance file.

    Format (JSON, UTF-8)::

        {"hub": "<id>", "agents": <int>, "edges": [["<u>", "<v>", <weight>], ...]}

    A missing third element defaults the weight to 1. Weights are positive
    integers, decimal strings, or "p/q" ratio strings.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InstanceFormatError("syntax", f"not UTF-8: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError("syntax", f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InstanceFormatError("syntax", "top-level JSON value must be an object")
    for key in ("hub", "agents", "edges"):
        if key not in data:
            raise InstanceFormatError("syntax", f"missing key {key!r}")
    hub = data["hub"]
    if not isinstance(hub, str):
        raise InstanceFormatError("syntax", "hub must be a string")
    agents = data["agents"]
    if not isinstance(agents, int) or isinstance(agents, bool) or agents < 1:
        raise InstanceFormatError("bad-agents", f"agents must be an integer >= 1, got {agents!r}")
    raw_edges = data["edges"]
    if not isinstance(raw_edges, list):
        raise InstanceFormatError("syntax", "edges must be a list")
    edges = []
    for entry in raw_edges:
        if not isinstance(entry, list) or len(entry) not in (2, 3):
            raise InstanceFormatError("syntax", f"bad edge entry {entry!r}")
        u, v = entry[0], entry[1]
        if not isinstance(u, str) or not isinstance(v, str):
            raise InstanceFormatError("syntax", f"edge endpoints must be strings: {entry!r}")
        w = parse_weight(entry[2]) if len(entry) == 3 else Fraction(1)
        edges.append((u, v, w))
    topology = Topology(edges, hub)
    return Instance(topology, agents)


def serialize_instance(instance: Instance) -> str:
    """Canonical byte-stable serialization (sorted keys, sorted edges)."""
    edges = []
    for u, v, w in instance.topology.edges():
        if w == 1:
            edges.append([u, v])
        else:
            edges.append([u, v, format_weight(w)])
    payload = {
        "agents": instance.agents,
        "edges": edges,
        "hub": instance.topology.hub,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def parse_allocation(instance: Instance, text: bytes | str) -> Allocation:
    """Parse an allocation file ``{"assignment": {"<order>": <agent>, ...}}``."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise AllocationFormatError("syntax", f"not UTF-8: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AllocationFormatError("syntax", f"invalid JSON: {exc}") from None
    if not isinstance(data, dict) or "assignment" not in data:
        raise AllocationFormatError("syntax", "expected an object with an 'assignment' key")
    assignment = data["assignment"]
    if not isinstance(assignment, dict):
        raise AllocationFormatError("syntax", "assignment must be an object")
    for v, a in assignment.items():
        if not isinstance(a, int) or isinstance(a, bool):
            raise AllocationFormatError("bad-agent", f"agent for {v!r} must be an integer")
    alloc = Allocation(assignment)
    alloc.validate(instance)
    return alloc


def serialize_allocation(alloc: Allocation) -> str:
    payload = {"assignment": dict(sorted(alloc.assignment.items()))}
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
