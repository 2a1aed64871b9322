import itertools
import random

import networkx as nx
import pytest

from wqoforge import catalog
from wqoforge.graphs import (
    LabelledGraph,
    LabelOrder,
    complete_graph,
    cycle_graph,
    is_embedding,
    labelled_embedding,
    path_graph,
    subword_embedding,
)
from wqoforge.mlgraph import (
    EdgeSelector,
    Leaf,
    MonoidMismatch,
    NotIdempotent,
    UnequalEvaluations,
    WordGraph,
    binary,
    binary_product,
    downcast,
    evaluate,
    expr_to_graph,
    flatten,
    idem,
    idempotent_product,
    leaf,
    simon_forest,
    validate,
)


@pytest.fixture
def mp():
    m = catalog.mpath()
    return m, EdgeSelector.middle_in(m, ["s"])


# --- graphs --------------------------------------------------------------------------------


def test_embedding_examples():
    assert labelled_embedding(path_graph(2), path_graph(3)) is not None
    assert labelled_embedding(path_graph(3), complete_graph(3)) is None
    # a 4-cycle inside a 7-vertex graph
    G = LabelledGraph.build(range(1, 8), [(1, 2), (2, 3), (3, 4), (4, 1), (2, 5), (5, 6), (6, 3), (5, 7)])
    H = cycle_graph(4)
    h = labelled_embedding(H, G)
    assert h is not None and is_embedding(H, G, h)


def test_embedding_matches_vf2():
    rng = random.Random(11)
    for _ in range(150):
        g = nx.gnp_random_graph(rng.randint(1, 5), 0.5, seed=rng.randrange(10**6))
        h = nx.gnp_random_graph(rng.randint(1, 7), 0.5, seed=rng.randrange(10**6))
        G = LabelledGraph.build(g.nodes, g.edges)
        H = LabelledGraph.build(h.nodes, h.edges)
        ref = nx.algorithms.isomorphism.GraphMatcher(h, g).subgraph_is_isomorphic()
        got = labelled_embedding(G, H)
        assert (got is not None) == ref
        if got is not None:
            assert is_embedding(G, H, got)


def test_label_order_direction():
    chain = LabelOrder.chain(["a", "b"])  # a <= b
    g = LabelledGraph.build([1], [], {1: "b"})
    h = LabelledGraph.build([1], [], {1: "a"})
    # default direction: the image label lies below the original one
    assert labelled_embedding(g, h, chain) is not None
    assert labelled_embedding(h, g, chain) is None
    assert labelled_embedding(h, g, chain, direction="usual") is not None


def test_subword():
    assert subword_embedding("ab", "acb")
    assert not subword_embedding("aa", "a")
    chain = LabelOrder.chain(["a", "b"])
    assert subword_embedding("a", "b", chain) != subword_embedding("b", "a", chain)


def test_graph_exports():
    g = path_graph(3)
    dot = g.to_dot()
    assert dot.startswith("graph G {") and '"1" -- "2";' in dot and '"1" -- "3"' not in dot
    assert [list(e) for e in g.to_json()["edges"]] == [[1, 2], [2, 3]]
    assert nx.is_isomorphic(g.to_networkx(), nx.path_graph(3))


# --- word graphs ------------------------------------------------------------------------------


def test_word_graph_examples(mp):
    t = catalog.trivial()
    tri = downcast(WordGraph(t, EdgeSelector(t, [(0, 0, 0)]), [0, 0, 0]))
    assert tri.same_as(complete_graph(3), labels=False)
    m, P = mp
    g = downcast(WordGraph(m, P, ["s", "s", "s"]))
    assert g.sorted_edges() == [(1, 2), (2, 3)]
    assert downcast(WordGraph(m, P, ["s", "s"])).sorted_edges() == [(1, 2)]
    one = downcast(WordGraph(m, P, ["s"]))
    assert len(one) == 1 and not one.edges
    assert len(downcast(WordGraph(m, P, []))) == 0
    assert downcast(WordGraph(t, EdgeSelector(t, [(0, 0, 0)]), [0] * 4)).same_as(complete_graph(4), labels=False)


def test_labels_and_invariant(mp):
    m, P = mp
    rng = random.Random(2)
    for _ in range(50):
        w = [rng.choice(m.elements) for _ in range(rng.randint(0, 8))]
        g = WordGraph(m, P, w)
        assert g.check_invariants()
        for i in g.vertices:
            assert m.mul(g.l(i), g.r(i)) == g.value
            assert g.l(i) == m.product(w[:i]) and g.r(i) == m.product(w[i:])


def test_edge_rule_against_definition(mp):
    m, _ = mp
    rng = random.Random(4)
    P = EdgeSelector(m, [t for t in itertools.product(m.elements, repeat=3) if rng.random() < 0.4])
    for _ in range(30):
        w = [rng.choice(m.elements) for _ in range(rng.randint(1, 6))]
        a, b = rng.choice(m.elements), rng.choice(m.elements)
        g = downcast(WordGraph(m, P, w), a, b)
        for i, j in itertools.combinations(range(1, len(w) + 1), 2):
            want = (m.mul(a, m.product(w[:i])), m.product(w[i:j]), m.mul(m.product(w[j:]), b)) in P
            assert g.has_edge(i, j) == want


def test_products(mp):
    m, P = mp
    s = WordGraph(m, P, ["s"])
    assert downcast(binary_product(s, s)).sorted_edges() == [(1, 2)]
    empty = WordGraph(m, P, [])
    assert binary_product(s, empty).letters == s.letters
    g1, g2, g3 = (WordGraph(m, P, w) for w in (["s"], ["1", "s"], ["z"]))
    assert binary_product(binary_product(g1, g2), g3).letters == binary_product(g1, binary_product(g2, g3)).letters
    ss = WordGraph(m, P, ["s", "s"])
    assert len(idempotent_product([ss, ss, ss])) == 6
    assert idempotent_product([ss]).letters == ss.letters
    with pytest.raises(UnequalEvaluations):
        idempotent_product([ss, s])
    with pytest.raises(NotIdempotent):
        idempotent_product([s, s])
    u = catalog.u1()
    with pytest.raises(MonoidMismatch):
        binary_product(s, WordGraph(u, EdgeSelector(u), ["0"]))


# --- factorisation forests ------------------------------------------------------------------


def test_forest_examples(mp):
    m, P = mp
    f = simon_forest(m, None, ["s"] * 4)
    assert flatten(f) == [m.id_of("s")] * 4 and validate(m, f) and f.depth <= 9
    one = simon_forest(m, None, ["s"])
    assert isinstance(one, Leaf) and one.depth == 0
    t = catalog.trivial()
    f = simon_forest(t, None, [0] * 8)
    assert f.depth <= 3 and validate(t, f)
    assert simon_forest(m, None, []) is None


def test_expr_nodes(mp):
    m, P = mp
    s, z = m.id_of("s"), m.id_of("z")
    ab = binary(m, leaf(m, s), leaf(m, z))
    assert flatten(ab) == [s, z] and evaluate(m, ab) == z
    with pytest.raises(UnequalEvaluations):
        idem(m, [leaf(m, s), leaf(m, z)])
    with pytest.raises(NotIdempotent):
        idem(m, [leaf(m, s), leaf(m, s)])
    node = idem(m, [leaf(m, z), leaf(m, z)])
    assert validate(m, node)
    assert expr_to_graph(node, P).letters == (z, z)


def test_forest_round_trip_random():
    rng = random.Random(9)
    for m in (catalog.mpath(), catalog.min3(), catalog.sl2(), catalog.cyclic(2), catalog.gap_to_tm_monoid(2)):
        for _ in range(100):
            w = [rng.choice(m.elements) for _ in range(rng.randint(1, 40))]
            f = simon_forest(m, None, w)
            assert flatten(f) == w
            assert evaluate(m, f) == m.product(w)
            assert validate(m, f)
            assert f.depth <= 3 * m.size
