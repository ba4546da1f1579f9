"""Instance families: tightness constructions, reduction gadgets, random trees.

Gadget generators sort their numeric inputs descending before building, so
identical inputs always produce byte-identical instances.
"""
from __future__ import annotations

import random
from typing import Sequence

from .model import Instance, Topology


def gen_ponw_util(m: int, n: int) -> Instance:
    """Unit path of m-n orders from the hub with n pendant leaves at the far
    end. The family on which careless-but-non-wasteful dispatch costs the
    most total driving relative to a single-driver plan."""
    if not m > n >= 1:
        raise ValueError(f"need m > n >= 1, got m={m}, n={n}")
    edges = []
    prev = "h"
    for i in range(1, m - n + 1):
        cur = f"p{i}"
        edges.append((prev, cur, 1))
        prev = cur
    for j in range(1, n + 1):
        edges.append((prev, f"t{j}", 1))
    return Instance(Topology(edges, "h"), n)


def gen_spider(n: int, length: int) -> Instance:
    """n unit paths of the given length hanging from the hub; m = n*length."""
    if n < 1 or length < 1:
        raise ValueError(f"need n, length >= 1, got n={n}, length={length}")
    edges = []
    for leg in range(1, n + 1):
        prev = "h"
        for step in range(1, length + 1):
            cur = f"leg{leg}v{step}"
            edges.append((prev, cur, 1))
            prev = cur
    return Instance(Topology(edges, "h"), n)


def gen_3partition_star(elements: Sequence[int]) -> Instance:
    """Weighted star with one spoke per element; len(elements)/3 agents.

    When every element lies strictly between a quarter and half of the
    per-agent total, the share is at most that total exactly when the
    elements split into triples of equal sum.
    """
    if len(elements) % 3 != 0 or not elements:
        raise ValueError("need a nonempty multiple-of-3 element list")
    return _weighted_star(elements, len(elements) // 3)


def gen_equitable_star(elements: Sequence[int]) -> Instance:
    """Weighted star for two agents; share <= half the total exactly when the
    elements split into two halves of equal sum and size."""
    if not elements:
        raise ValueError("need a nonempty element list")
    return _weighted_star(elements, 2)


def _weighted_star(elements: Sequence[int], agents: int) -> Instance:
    weights = sorted(elements, reverse=True)
    if any(w < 1 for w in weights):
        raise ValueError("elements must be positive")
    edges = [("h", f"o{i}", w) for i, w in enumerate(weights, start=1)]
    return Instance(Topology(edges, "h"), agents)


def gen_3partition_depth2(elements: Sequence[int]) -> Instance:
    """Unit-weight depth-two tree: one star gadget per element, with that many
    leaves under a dedicated center; len(elements)/3 agents. Target share is
    the per-agent element total plus three (one unit per serviced center)."""
    if len(elements) % 3 != 0 or not elements:
        raise ValueError("need a nonempty multiple-of-3 element list")
    weights = sorted(elements, reverse=True)
    if any(w < 1 for w in weights):
        raise ValueError("elements must be positive")
    edges = []
    for i, w in enumerate(weights, start=1):
        center = f"c{i}"
        edges.append(("h", center, 1))
        for j in range(1, w + 1):
            edges.append((center, f"c{i}x{j}", 1))
    return Instance(Topology(edges, "h"), len(weights) // 3)


def gen_binpacking_paths(elements: Sequence[int], bins: int) -> Instance:
    """One unit path per element hanging off the hub; ``bins`` agents.

    Non-wastefulness forces each path to a single agent, so the share is at
    most the bin capacity exactly when the elements pack perfectly.
    """
    if bins < 1 or not elements:
        raise ValueError("need bins >= 1 and a nonempty element list")
    weights = sorted(elements, reverse=True)
    if any(w < 1 for w in weights):
        raise ValueError("elements must be positive")
    edges = []
    for i, w in enumerate(weights, start=1):
        prev = "h"
        for j in range(1, w + 1):
            cur = f"g{i}v{j}"
            edges.append((prev, cur, 1))
            prev = cur
    return Instance(Topology(edges, "h"), bins)


def gen_random_tree(
    m: int, max_weight: int = 1, seed: int = 0, agents: int = 2
) -> Instance:
    """Random tree by uniform attachment: order i hangs off a uniformly random
    earlier vertex, with integer weights in [1, max_weight]. Deterministic
    under the seed. (Uniform attachment, not uniform over labeled trees.)"""
    if m < 1:
        raise ValueError("need m >= 1")
    rng = random.Random(seed)
    names = ["h"] + [f"v{i}" for i in range(1, m + 1)]
    edges = []
    for i in range(1, m + 1):
        parent = names[rng.randrange(i)]
        weight = rng.randint(1, max_weight) if max_weight > 1 else 1
        edges.append((parent, names[i], weight))
    return Instance(Topology(edges, "h"), agents)


def gen_random_caterpillar(
    spine: int,
    legs: int | Sequence[int],
    seed: int = 0,
    agents: int = 2,
) -> Instance:
    """Unit caterpillar: a spine path from the hub with pendant leaves.

    ``legs`` may be an explicit per-spine-vertex count sequence, or an int
    upper bound from which counts are drawn uniformly (seeded).
    """
    if spine < 1:
        raise ValueError("need spine >= 1")
    if isinstance(legs, int):
        rng = random.Random(seed)
        counts = [rng.randint(0, legs) for _ in range(spine)]
    else:
        counts = list(legs)
        if len(counts) != spine:
            raise ValueError("legs sequence must have one count per spine vertex")
    edges = []
    prev = "h"
    for i in range(1, spine + 1):
        cur = f"s{i}"
        edges.append((prev, cur, 1))
        for j in range(1, counts[i - 1] + 1):
            edges.append((cur, f"s{i}l{j}", 1))
        prev = cur
    return Instance(Topology(edges, "h"), agents)
