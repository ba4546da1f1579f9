import pytest

from fairhaul import Allocation, Instance, Topology


def two_branch_instance() -> Instance:
    """Seven vertices, three agents: the hub feeds a short branch (one dead
    end behind u1) and a longer branch that forks at u3 into two dead ends."""
    edges = [
        ("h", "u1", 1), ("h", "u2", 1), ("u2", "u3", 1),
        ("u1", "l1", 1), ("u3", "l2", 1), ("u3", "l3", 1),
    ]
    return Instance(Topology(edges, "h"), 3)


@pytest.fixture
def branching7() -> Instance:
    return two_branch_instance()


@pytest.fixture
def wasteful_alloc() -> Allocation:
    # equal costs (3, 3, 3) but agent 2 services u2 without any dead end below
    return Allocation({"u1": 2, "u2": 2, "l1": 2, "u3": 3, "l2": 3, "l3": 1})


@pytest.fixture
def tidy_alloc() -> Allocation:
    # non-wasteful, costs (3, 2, 3)
    return Allocation({"u1": 2, "l1": 2, "u2": 1, "u3": 3, "l2": 3, "l3": 1})


def unit_star(m: int, n: int) -> Instance:
    return Instance(Topology([("h", f"o{i}", 1) for i in range(1, m + 1)], "h"), n)
