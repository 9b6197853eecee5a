import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtsync.graph import (
    Graph,
    complete_graph,
    complete_split,
    is_quasi_threshold,
    labeled_graphs,
    path_graph,
    threshold_from_sequence,
)
from qtsync.skeleton import (
    NotQuasiThresholdError,
    RootedForest,
    canonical_form,
    caterpillar_from_sequence,
    comparability_closure,
    forests_from_parent_arrays,
    rooted_trees,
    tree_representation,
)


def star_tree(k):
    return RootedForest([None] + [0] * k)


def path_tree(n):
    return RootedForest([None] + list(range(n - 1)))


def test_forest_validation():
    with pytest.raises(ValueError, match="cycle"):
        RootedForest([1, 0])
    with pytest.raises(ValueError):
        RootedForest([None, 5])
    with pytest.raises(ValueError):
        RootedForest([0])


def test_tree_queries():
    t = path_tree(3)
    assert t.descendants(0) == {1, 2}
    assert t.ancestors(2) == {0, 1}
    assert t.children(1) == (2,)
    assert t.depth(2) == 2 and t.height() == 2
    s = star_tree(3)
    assert s.depth(1) == 1 and s.height() == 1
    with pytest.raises(IndexError):
        s.depth(9)


def test_closure_small():
    assert comparability_closure(star_tree(4)) == complete_split(1, 4)
    assert comparability_closure(path_tree(5)) == complete_graph(5)


def test_caterpillar_small():
    assert caterpillar_from_sequence("1") == RootedForest([1, None])
    f = caterpillar_from_sequence("01")
    assert f.roots == [2] and set(f.children(2)) == {0, 1}
    assert caterpillar_from_sequence("") == RootedForest([None])
    with pytest.raises(ValueError, match="ends in 0"):
        caterpillar_from_sequence("10")


def test_caterpillar_example_sequence():
    f = caterpillar_from_sequence("10101011001")
    # letters A..L are vertices 0..11; spine L-I-H-F-D-B-A from the root
    A, B, c, D, e, F, g, H, I, j, k, L = range(12)
    assert f.roots == [L]
    assert [f.parent[v] for v in (I, H, F, D, B, A)] == [L, I, H, F, D, B]
    assert f.parent[j] == L and f.parent[k] == L
    assert f.parent[g] == H and f.parent[e] == F and f.parent[c] == D
    assert comparability_closure(f) == threshold_from_sequence("10101011001")


@pytest.mark.parametrize("length", range(1, 9))
def test_caterpillar_roundtrip_exhaustive(length):
    for tup in itertools.product("01", repeat=length - 1):
        bits = "".join(tup) + "1"
        assert comparability_closure(caterpillar_from_sequence(bits)) == threshold_from_sequence(bits)


def test_tree_representation_examples():
    assert tree_representation(complete_graph(4)) == path_tree(4)
    assert tree_representation(complete_split(1, 3)) == star_tree(3)
    with pytest.raises(NotQuasiThresholdError):
        tree_representation(path_graph(4))


def test_tree_representation_forest_for_disconnected():
    g = Graph(5, [(0, 1), (3, 4)])
    f = tree_representation(g)
    assert len(f.roots) == 3
    assert comparability_closure(f) == g


def test_rooted_tree_counts():
    assert [len(rooted_trees(n)) for n in range(1, 8)] == [1, 1, 2, 4, 9, 20, 48]


@pytest.mark.parametrize("n", range(1, 8))
def test_enumerator_matches_parent_array_filter(n):
    brute = {canonical_form(f) for f in forests_from_parent_arrays(n)}
    mine = [canonical_form(f) for f in rooted_trees(n)]
    assert len(mine) == len(set(mine))
    assert set(mine) == brute


@pytest.mark.parametrize("n", range(1, 8))
def test_closure_representation_roundtrip_on_trees(n):
    for t in rooted_trees(n):
        g = comparability_closure(t)
        assert comparability_closure(tree_representation(g)) == g


@pytest.mark.parametrize("n", range(1, 8))
def test_neighbourhood_is_ancestors_plus_descendants(n):
    for t in rooted_trees(n):
        g = comparability_closure(t)
        for v in range(n):
            anc, desc = t.ancestors(v), t.descendants(v)
            assert not anc & desc
            assert anc | desc == set(g.neighbors[v])


def test_closure_identity_on_connected_qt_graphs():
    for n in range(1, 7):
        for g in labeled_graphs(n):
            if g.is_connected() and is_quasi_threshold(g):
                f = tree_representation(g)
                assert len(f.roots) == 1
                assert comparability_closure(f) == g


@given(st.lists(st.integers(0, 1000), min_size=1, max_size=9))
def test_random_parent_arrays_roundtrip(raw):
    parent = [None] + [raw[v] % v for v in range(1, len(raw))]
    g = comparability_closure(RootedForest(parent))
    assert comparability_closure(tree_representation(g)) == g
