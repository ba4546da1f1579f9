import pytest

from fairhaul import (
    brute_force_mms,
    gen_3partition_depth2,
    gen_3partition_star,
    gen_binpacking_paths,
    gen_equitable_star,
    gen_ponw_util,
    gen_random_caterpillar,
    gen_random_tree,
    gen_spider,
    serialize_instance,
)
from fairhaul.structure import classify, is_caterpillar


def test_ponw_util_shape():
    inst = gen_ponw_util(5, 2)
    assert inst.m == 5 and inst.agents == 2
    assert len(inst.topology.leaf_ids) == 2
    minimal = gen_ponw_util(4, 3)  # single path vertex plus the pendants
    assert minimal.m == 4 and len(minimal.topology.leaf_ids) == 3
    with pytest.raises(ValueError):
        gen_ponw_util(2, 2)


def test_spider_shape():
    inst = gen_spider(2, 3)
    assert inst.m == 6
    single = gen_spider(1, 4)
    assert classify(single)["is_path"]


def test_equitable_star_examples():
    assert brute_force_mms(gen_equitable_star([5, 5])).share == 5
    assert brute_force_mms(gen_equitable_star([3, 3, 4])).share == 6


def test_3partition_star_example():
    inst = gen_3partition_star([1, 2, 3, 1, 2, 3])
    assert inst.agents == 2
    assert brute_force_mms(inst).share == 6
    with pytest.raises(ValueError):
        gen_3partition_star([1, 2])


def test_depth2_gadget_shape():
    inst = gen_3partition_depth2([1, 1, 2, 1, 1, 2])
    # each element contributes its leaves plus one center
    assert inst.m == sum([1, 1, 2, 1, 1, 2]) + 6
    cls = classify(inst)
    assert cls["depth"] == 2 and cls["diameter"] == 4
    assert brute_force_mms(inst).share == 4 + 3


def test_binpacking_example():
    inst = gen_binpacking_paths([2, 2, 2], 2)
    assert brute_force_mms(inst).share == 4
    assert brute_force_mms(gen_binpacking_paths([3, 3], 2)).share == 3
    # deleting the hub leaves the disjoint item paths
    top = inst.topology
    assert all(top.degree(v) <= 2 for v in top.order_ids)


def test_generators_are_deterministic():
    a = serialize_instance(gen_random_tree(9, max_weight=4, seed=11, agents=3))
    b = serialize_instance(gen_random_tree(9, max_weight=4, seed=11, agents=3))
    assert a == b
    assert a != serialize_instance(gen_random_tree(9, max_weight=4, seed=12, agents=3))
    c1 = serialize_instance(gen_random_caterpillar(4, 3, seed=5))
    c2 = serialize_instance(gen_random_caterpillar(4, 3, seed=5))
    assert c1 == c2


def test_gadgets_sort_elements_descending():
    a = serialize_instance(gen_3partition_star([3, 1, 2, 3, 2, 1]))
    b = serialize_instance(gen_3partition_star([1, 1, 2, 2, 3, 3]))
    assert a == b


def test_random_caterpillar_classifies_as_caterpillar():
    for seed in range(20):
        inst = gen_random_caterpillar(4, 2, seed=seed)
        assert is_caterpillar(inst.topology), seed
    explicit = gen_random_caterpillar(3, [2, 0, 1])
    assert explicit.m == 3 + 3


def test_single_order_tree():
    inst = gen_random_tree(1, seed=0)
    assert inst.m == 1 and inst.topology.leaf_ids == ("v1",)
