import itertools
import random

import pytest

from wqoforge import catalog
from wqoforge.graphs import LabelOrder, complete_graph
from wqoforge.io import load_document, load_gap_tree, load_tree_model
from wqoforge.treemodel import (
    UNIT,
    GapTree,
    MuMissingAtLca,
    NotTotallyOrdered,
    TreeError,
    TreeModel,
    TreeTooLarge,
    dt_relabel,
    gap_embedding,
    grow_tree_model,
    induced_leaf_map,
    is_gap_embedding,
    j_edge_order,
    layered,
    mtogap,
    random_parents,
    random_tree_model,
    tm_embedding,
    tmeval,
)


def random_gap_tree(n, rng, labels=3):
    parents = random_parents(n, rng)
    vl = {v: rng.randrange(2) for v in range(n)}
    el = {v: rng.randrange(labels) for v in range(1, n)}
    return GapTree(parents, vl, el)


# --- tree models ---------------------------------------------------------------------------


def test_tmeval_examples():
    m = catalog.min_monoid(2)
    k2 = TreeModel(m, [None, 0, 0], {0: [("1", "1")]}, {1: "1", 2: "1"})
    assert tmeval(k2).same_as(complete_graph(2), labels=False)
    indep = TreeModel(m, [None, 0, 0], {0: []}, {1: "1", 2: "1"})
    g = tmeval(indep)
    assert len(g) == 2 and not g.edges
    with pytest.raises(MuMissingAtLca):
        tmeval(TreeModel(m, [None, 0, 0], {}, {1: "1", 2: "1"}))
    with pytest.raises(TreeError):
        TreeModel(m, [None, 0], {}, {})


def test_tmeval_uses_products_below_the_lca():
    m = catalog.mpath()
    # root -> 1 -> {2, 3}: the leaves meet at vertex 1, so only the last edge counts
    t = TreeModel(m, [None, 0, 1, 1], {0: [], 1: [("s", "s")]}, {1: "z", 2: "s", 3: "s"})
    assert t.path_product(2, 0) == m.id_of("z") and t.path_product(2, 1) == m.id_of("s")
    assert tmeval(t).sorted_edges() == [(2, 3)]


def test_path_product_is_root_to_leaf():
    m = catalog.sl2()
    rng = random.Random(3)
    for _ in range(30):
        t = random_tree_model(m, 6, rng)
        for v in range(t.n):
            assert t.path_product(v, t.root) == m.product(t.root_word(v))


def test_tm_self_embedding_and_json():
    rng = random.Random(8)
    for _ in range(20):
        t = random_tree_model(catalog.min3(), rng.randint(1, 7), rng)
        h = tm_embedding(t, t)
        assert h is not None
        again = TreeModel.from_json(t.to_json())
        assert again.mu == t.mu and again.lam == t.lam and again.parents == t.parents


def test_tm_figure_pair():
    left = load_tree_model(load_document("builtin:tm_fig_left"))
    right = load_tree_model(load_document("builtin:tm_fig_right"))
    h = tm_embedding(left, right)
    assert h is not None
    # leaves go to leaves and the induced graph map is an embedding
    assert set(induced_leaf_map(h, left)) == set(left.leaves)
    gl, gr = tmeval(left), tmeval(right)
    lm = induced_leaf_map(h, left)
    for x, y in itertools.combinations(left.leaves, 2):
        assert gl.has_edge(x, y) == gr.has_edge(lm[x], lm[y])


def test_single_edge_into_two_edge_path():
    m = catalog.min3()
    for a, u, v in itertools.product(m.elements, repeat=3):
        s = TreeModel(m, [None, 0], {0: []}, {1: a})
        t = TreeModel(m, [None, 0, 1], {0: [], 1: []}, {1: u, 2: v})
        assert (tm_embedding(s, t) is not None) == (m.mul(u, v) == a)


# --- gap trees ---------------------------------------------------------------------------------


def test_gap_figure():
    left = load_gap_tree(load_document("builtin:gap_fig_left"))
    right_doc = load_document("builtin:gap_fig_right")
    right = load_gap_tree(right_doc)
    h = gap_embedding(left, right)
    assert h is not None and is_gap_embedding(left, right, h)
    # the image of the label-6 edge ends in a 6; changing it to 7 breaks the embedding
    right_doc["edge_labels"]["7"] = 7
    assert gap_embedding(left, load_gap_tree(right_doc)) is None
    assert gap_embedding(left, load_gap_tree(right_doc), last_equal=False) is not None


def test_gap_identity_and_json():
    rng = random.Random(4)
    for _ in range(30):
        g = random_gap_tree(rng.randint(1, 9), rng)
        h = gap_embedding(g, g)
        assert h is not None and is_gap_embedding(g, g, h)
        again = GapTree(g.to_json()["parents"], g.to_json()["vertex_labels"], g.to_json()["edge_labels"])
        assert again.parents == g.parents and again.edge_labels == g.edge_labels


def test_matching_search_agrees_with_brute_force():
    rng = random.Random(12)
    hits = 0
    for _ in range(300):
        s = random_gap_tree(rng.randint(1, 5), rng)
        t = random_gap_tree(rng.randint(1, 8), rng)
        for last in (True, False):
            fast = gap_embedding(s, t, last_equal=last)
            slow = gap_embedding(s, t, last_equal=last, brute_force=True)
            assert (fast is None) == (slow is None)
            if fast is not None:
                hits += 1
                assert is_gap_embedding(s, t, fast, last_equal=last)
    assert hits > 20


def test_brute_force_cap():
    big = GapTree(random_parents(13, random.Random(0)), {v: 0 for v in range(13)}, {v: 0 for v in range(1, 13)})
    with pytest.raises(TreeTooLarge):
        gap_embedding(big, big, brute_force=True)
    assert gap_embedding(big, big) is not None


def test_dt_relabel():
    one = dt_relabel(GapTree([None], {0: "x"}, {}))
    assert one.vertex_labels == {0: ("x", UNIT)}
    left = load_gap_tree(load_document("builtin:gap_fig_left"))
    right = load_gap_tree(load_document("builtin:gap_fig_right"))
    assert gap_embedding(dt_relabel(left), dt_relabel(right), last_equal=False) is not None


def test_dt_relabel_reflects_gap_embeddings():
    rng = random.Random(21)
    found = 0
    for _ in range(400):
        s = random_gap_tree(rng.randint(1, 5), rng, labels=2)
        t = random_gap_tree(rng.randint(1, 9), rng, labels=2)
        h = gap_embedding(dt_relabel(s), dt_relabel(t), last_equal=False)
        if h is not None:
            found += 1
            assert is_gap_embedding(s, t, h, last_equal=True)
    assert found > 10


# --- layered interpretation and mtogap ------------------------------------------------------------


def test_layered_examples():
    m = catalog.min3()
    assert layered(m, []) == (m.identity,) * m.size
    word = ["2", "1", "3"]
    assert [m.names[x] for x in layered(m, word)] == ["1", "2", "3"]
    comps = layered(m, word)
    # component a keeps the letters J-above a
    for a, c in zip(m.elements, comps):
        assert c == m.product([x for x in map(m.id_of, word) if m.j_leq(a, x)])
    with pytest.raises(NotTotallyOrdered):
        layered(catalog.sl2(), ["{x}"])


def test_layered_is_a_morphism():
    rng = random.Random(2)
    for m in (catalog.min3(), catalog.min_monoid(2), catalog.u1(), catalog.gap_to_tm_monoid(2)):
        for _ in range(100):
            u = [rng.choice(m.elements) for _ in range(rng.randint(0, 5))]
            v = [rng.choice(m.elements) for _ in range(rng.randint(0, 5))]
            lu, lv, luv = layered(m, u), layered(m, v), layered(m, u + v)
            assert luv == tuple(m.mul(x, y) for x, y in zip(lu, lv))


def test_mtogap_requires_total_order():
    t = random_tree_model(catalog.sl2(), 3, random.Random(0))
    with pytest.raises(NotTotallyOrdered):
        mtogap(t)


def test_mtogap_reflects_tree_model_embeddings():
    rng = random.Random(6)
    m = catalog.min3()
    hits = 0
    for _ in range(300):
        t1 = random_tree_model(m, rng.randint(1, 4), rng)
        t2 = grow_tree_model(t1, rng, rng.randint(0, 4)) if rng.random() < 0.7 else random_tree_model(m, rng.randint(1, 7), rng)
        h = gap_embedding(mtogap(t1), mtogap(t2))
        if h is not None:
            hits += 1
            assert tm_embedding(t1, t2) is not None
    assert hits > 20


def diagonal_pair(m, k, n, rng):
    """A tree model over the gap monoid with labels ``(a,a)`` and the gap tree it encodes."""
    parents = random_parents(n, rng)
    lab = {v: rng.randint(1, k) for v in range(1, n)}
    kids = {p for p in parents if p is not None}
    mu = {v: rng.choice([[], [("(1,1)", "(1,1)")]]) for v in kids}
    t = TreeModel(m, parents, mu, {v: f"({a},{a})" for v, a in lab.items()})
    return t, GapTree(parents, {v: t.mu.get(v) for v in range(n)}, lab)


def test_diagonal_gap_matches_tm():
    # over diagonal labels the product along a path is (min, last), which is the gap rule
    m = catalog.gap_to_tm_monoid(3)
    rng = random.Random(13)
    hits = 0
    for _ in range(300):
        t1, g1 = diagonal_pair(m, 3, rng.randint(1, 4), rng)
        t2, g2 = diagonal_pair(m, 3, rng.randint(1, 8), rng)
        tm = tm_embedding(t1, t2) is not None
        assert tm == (gap_embedding(g1, g2) is not None)
        assert tm == (gap_embedding(g1, g2, brute_force=True) is not None)
        hits += tm
    assert hits > 10


def test_j_edge_order():
    m = catalog.min3()
    o = j_edge_order(m)
    assert isinstance(o, LabelOrder)
    for a, b in itertools.product(m.elements, repeat=2):
        assert o.leq(a, b) == m.j_leq(a, b)
