import random

import pytest

from dcveb.core import Capacity, DcvebArray, Entry
from dcveb.oracle import OracleMap
from dcveb.walker import quiescent_walk


def make_array(**kwargs):
    kwargs.setdefault("branching", 64)
    return DcvebArray(**kwargs)


class TestConstruction:
    def test_fresh_structure(self):
        array = make_array()
        assert array.capacity_snapshot() == Capacity(64, 1)
        assert array.successor(0) is None
        assert array.minimum() is None
        assert array.maximum() is None
        for key in (0, 5, 63, 64, 4096):
            assert array.get(key) is None

    def test_invalid_branching(self):
        for n in (0, 1, 3, 65):
            with pytest.raises(ValueError):
                DcvebArray(branching=n)

    def test_max_rep_defaults(self):
        assert DcvebArray(branching=64, key_bits=31).max_rep == 6
        assert DcvebArray(branching=64, key_bits=63).max_rep == 11

    def test_max_rep_below_bound_rejected(self):
        with pytest.raises(ValueError):
            DcvebArray(branching=64, key_bits=63, max_rep=5)

    def test_key_domain_enforced(self):
        array = DcvebArray(branching=64, key_bits=16)
        for bad in (-1, 1 << 16, "7", 2.0):
            with pytest.raises(ValueError):
                array.get(bad)
            with pytest.raises(ValueError):
                array.insert(bad, "x")
            with pytest.raises(ValueError):
                array.delete(bad)

    def test_none_value_rejected(self):
        with pytest.raises(ValueError):
            make_array().insert(1, None)


class TestInsertGet:
    def test_single_element(self):
        array = make_array()
        array.insert(5, "A")
        assert array.get(5) == Entry(5, "A")

    def test_growth_on_oversized_key(self):
        array = make_array()
        array.insert(70, "B")
        assert array.capacity_snapshot() == Capacity(4096, 2)
        assert array.get(70) == Entry(70, "B")

    def test_duplicate_insert_overwrites(self):
        array = make_array()
        array.insert(5, "A")
        array.insert(5, "B")
        assert array.get(5) == Entry(5, "B")

    def test_get_via_two_level_path(self):
        array = make_array()
        array.insert(130, "C")
        assert array.get(130) == Entry(130, "C")
        assert array.get(131) is None
        assert array.get(2) is None

    def test_existing_elements_survive_growth(self):
        array = make_array()
        for key in (0, 5, 63):
            array.insert(key, key)
        array.insert(2**30, "big")
        for key in (0, 5, 63):
            assert array.get(key) == Entry(key, key)
        assert array.get(2**30) == Entry(2**30, "big")

    def test_growth_height_for_max_int31(self):
        array = make_array()
        array.insert(2**31 - 1, "edge")
        snap = array.capacity_snapshot()
        assert snap.height == 6
        assert snap.size == 64**6
        assert array.get(2**31 - 1) == Entry(2**31 - 1, "edge")


class TestDelete:
    def test_delete_on_empty_is_noop(self):
        array = make_array()
        array.delete(7)
        assert array.capacity_snapshot() == Capacity(64, 1)
        assert quiescent_walk(array).ok()

    def test_insert_delete_round_trip(self):
        array = make_array()
        array.insert(130, "C")
        array.delete(130)
        assert array.get(130) is None

    def test_path_cleared_at_quiescence(self):
        array = make_array()
        array.insert(5, "A")
        array.delete(5)
        root = array._params().root
        assert root.summary.load() == 0
        assert all(child is None for child in root.children)
        assert quiescent_walk(array).ok()

    def test_sibling_keeps_shared_parent_alive(self):
        array = make_array()
        array.insert(130, "A")  # digits (2, 2)
        array.insert(131, "B")  # digits (2, 3)
        root = array._params().root
        parent = root.children[2]
        leaf = parent.children[2]
        array.delete(130)
        # parent keeps exactly the sibling's bit; the cleared leaf husk may
        # stay referenced
        assert parent.summary.load() == 1 << (64 - 1 - 3)
        assert parent.children[2] is leaf
        assert leaf.data is None and leaf.index == -1
        assert array.get(131) == Entry(131, "B")
        assert quiescent_walk(array).ok()

    def test_propagation_stops_at_branching_ancestor(self):
        array = make_array()
        array.insert(5, "low")        # root child 0
        array.insert(64 * 64 + 3, "deep")  # three-level path after growth
        root = array._params().root
        array.delete(64 * 64 + 3)
        assert array.get(5) == Entry(5, "low")
        # root still anchors the subtree holding key 5
        assert root is not array._params().root or root.summary.load() != 0
        assert quiescent_walk(array).ok()

    def test_delete_then_successor(self):
        array = make_array()
        array.insert(5, "A")
        array.insert(6, "B")
        array.delete(5)
        assert array.successor(0) == Entry(6, "B")

    def test_delete_of_absent_key_with_present_neighbors(self):
        array = make_array()
        array.insert(130, "C")
        array.delete(131)
        assert array.get(130) == Entry(130, "C")
        assert quiescent_walk(array).ok()

    def test_husk_leaf_is_reused(self):
        array = make_array()
        array.insert(130, "A")
        array.insert(131, "B")
        parent = array._params().root.children[2]
        leaf = parent.children[2]
        array.delete(130)
        array.insert(130, "again")
        assert parent.children[2] is leaf
        assert array.get(130) == Entry(130, "again")


class TestTrim:
    def test_trim_back_to_height_one(self):
        array = make_array()
        array.insert(70, "B")
        assert array.capacity_snapshot().height == 2
        array.insert(3, "A")
        array.delete(70)
        assert array.capacity_snapshot() == Capacity(64, 1)
        assert array.get(3) == Entry(3, "A")
        assert quiescent_walk(array).ok()

    def test_trim_cascades_multiple_levels(self):
        array = make_array()
        array.insert(3, "A")
        array.insert(2**31 - 1, "edge")
        assert array.capacity_snapshot().height == 6
        array.delete(2**31 - 1)
        assert array.capacity_snapshot() == Capacity(64, 1)
        assert array.get(3) == Entry(3, "A")
        assert quiescent_walk(array).ok()

    def test_no_trim_below_height_one(self):
        array = make_array()
        array.insert(5, "A")
        array.delete(5)
        assert array.capacity_snapshot().height == 1

    def test_no_trim_with_occupied_high_child(self):
        array = make_array()
        array.insert(3, "A")
        array.insert(70, "B")
        array.delete(3)  # children {0-subtree empty, 1 occupied}
        assert array.capacity_snapshot().height == 2
        assert array.get(70) == Entry(70, "B")

    def test_capacity_multiplies_by_fanout_per_level(self):
        array = make_array()
        sizes = [array.capacity_snapshot().size]
        for key in (64, 64**2, 64**3):
            array.insert(key, "x")
            sizes.append(array.capacity_snapshot().size)
        assert sizes == [64, 64**2, 64**3, 64**4]


class TestOrderQueries:
    def test_successor_of_present_key_is_itself(self):
        array = make_array()
        array.insert(5, "A")
        array.insert(130, "C")
        assert array.successor(5) == Entry(5, "A")
        assert array.successor(6) == Entry(130, "C")

    def test_successor_ascends_from_leftmost_path(self):
        array = make_array()
        array.insert(130, "C")
        assert array.successor(0) == Entry(130, "C")

    def test_successor_none_beyond_last(self):
        array = make_array()
        array.insert(5, "A")
        assert array.successor(6) is None

    def test_successor_key_at_or_above_capacity(self):
        array = make_array(key_bits=31)
        array.insert(5, "A")
        assert array.successor(63) is None
        assert array.successor(64) is None
        assert array.successor(2**20) is None

    def test_predecessor_mirror(self):
        array = make_array()
        array.insert(5, "A")
        array.insert(130, "C")
        assert array.predecessor(129) == Entry(5, "A")
        assert array.predecessor(130) == Entry(130, "C")
        assert array.predecessor(4) is None

    def test_predecessor_of_capacity_edge_is_maximum(self):
        array = make_array()
        array.insert(5, "A")
        array.insert(130, "C")
        size = array.capacity_snapshot().size
        assert array.predecessor(size - 1) == Entry(130, "C")
        assert array.maximum() == Entry(130, "C")

    def test_minimum_maximum(self):
        array = make_array()
        assert array.minimum() is None and array.maximum() is None
        array.insert(17, "only")
        assert array.minimum() == array.maximum() == Entry(17, "only")
        array.insert(5, "A")
        array.insert(130, "C")
        assert array.minimum() == Entry(5, "A")
        assert array.maximum() == Entry(130, "C")


class TestPathResolution:
    def test_empty_tree_stops_at_root(self):
        array = make_array()
        trail = array._make_path(0, array._params())
        assert trail.depth == 0
        assert trail.node is array._params().root

    def test_full_path_to_present_key(self):
        array = make_array()
        array.insert(130, "C")
        params = array._params()
        trail = array._make_path(130, params)
        assert trail.depth == params.height == 2
        assert trail.slots == [2, 2]
        assert trail.nodes[0] is params.root
        # each recorded node was read from the previous one's claimed slot
        assert trail.nodes[1] is params.root.children[2]
        assert trail.node is trail.nodes[1].children[2]

    def test_adjacent_key_misses_at_leaf_level(self):
        array = make_array()
        array.insert(130, "C")
        trail = array._make_path(131, array._params())
        assert trail.depth == 1
        assert trail.node is trail.nodes[1]  # stopped on its clear bit

    def test_residue_clean_is_idempotent_on_clean_tree(self):
        from dcveb.walker import structure_fingerprint

        array = make_array()
        for key in (3, 130, 5000):
            array.insert(key, key)
        before = structure_fingerprint(array)
        for key in (0, 3, 131, 4095):
            array._clean_residue(key)
        assert structure_fingerprint(array) == before

    def test_trim_noop_with_two_occupied_children(self):
        array = make_array()
        array.insert(70, "B")   # root child 1 at height 2
        array.insert(3, "A")    # root child 0
        array._trim_top()
        assert array.capacity_snapshot().height == 2
        assert array.get(3) == Entry(3, "A")
        assert array.get(70) == Entry(70, "B")


@pytest.mark.parametrize("branching", [2, 4, 8, 64])
def test_sequential_equivalence_small(branching):
    rng = random.Random(branching * 7 + 1)
    array = DcvebArray(branching=branching, key_bits=16)
    table = OracleMap()
    key_range = 200
    counter = 0
    for _ in range(4000):
        roll = rng.randrange(100)
        key = rng.randrange(key_range)
        if roll < 30:
            counter += 1
            array.insert(key, counter)
            table.insert(key, counter)
        elif roll < 55:
            array.delete(key)
            table.delete(key)
        elif roll < 70:
            assert array.get(key) == table.get(key)
        elif roll < 85:
            assert array.successor(key) == table.successor(key)
        elif roll < 95:
            assert array.predecessor(key) == table.predecessor(key)
        elif roll < 98:
            assert array.minimum() == table.minimum()
        else:
            assert array.maximum() == table.maximum()
    report = quiescent_walk(array)
    assert report.ok(), report.violations
    assert report.element_count == len(table)


def test_dense_fill_then_drain():
    array = DcvebArray(branching=4, key_bits=16)
    table = OracleMap()
    for key in range(256):
        array.insert(key, key)
        table.insert(key, key)
    assert array.capacity_snapshot().size == 256
    chain = []
    entry = array.minimum()
    while entry is not None:
        chain.append(entry.key)
        entry = array.successor(entry.key + 1) if entry.key + 1 < 256 else None
    assert chain == list(range(256))
    for key in range(0, 256, 2):
        array.delete(key)
        table.delete(key)
    for key in range(256):
        assert array.get(key) == table.get(key)
    report = quiescent_walk(array)
    assert report.ok(), report.violations
    for key in range(1, 256, 2):
        array.delete(key)
    assert array.minimum() is None
    # an emptied tree keeps its height: trimming fires only while exactly
    # child 0 remains occupied
    assert array.capacity_snapshot().height == 4
    assert quiescent_walk(array).ok()
