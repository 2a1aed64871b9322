import itertools
import random

import pytest

from wqoforge import catalog, twosat
from wqoforge.forestpath import (
    CutTables,
    ForestPath,
    ForestPathError,
    cut_certificate,
    enumerate_forest_paths,
    is_bad_forest_path,
    is_good_exhaustive,
    is_good_forest_path,
    tripled_embedding_holds,
    words_by_value,
)
from wqoforge.mlgraph import EdgeSelector


def random_selector(m, rng, density=0.5):
    return EdgeSelector(m, [t for t in itertools.product(m.elements, repeat=3) if rng.random() < density])


def test_twosat_against_brute_force():
    rng = random.Random(1)
    for _ in range(300):
        n = rng.randint(1, 6)
        vs = list(range(n))
        clauses = [
            ((rng.randrange(n), rng.random() < 0.5), (rng.randrange(n), rng.random() < 0.5))
            for _ in range(rng.randint(0, 12))
        ]
        res = twosat.solve(vs, clauses)
        brute = any(twosat.check(dict(zip(vs, bits)), clauses) for bits in itertools.product((False, True), repeat=n))
        assert res.satisfiable == brute
        if res.satisfiable:
            assert twosat.check(res.assignment, clauses)
        else:
            v = res.conflict_var
            assert res.chain_to_false[0] == (v, True) and res.chain_to_false[-1] == (v, False)


def test_forest_path_validation():
    m = catalog.mpath()
    P = EdgeSelector.middle_in(m, ["s"])
    with pytest.raises(ForestPathError):
        ForestPath(m, P, [])
    with pytest.raises(ForestPathError):
        ForestPath(m, P, [["s", "s"], ["s"]])
    with pytest.raises(ForestPathError):
        ForestPath(m, P, [["s"]])  # s is not idempotent
    p = ForestPath(m, P, [["s", "s"], ["s", "s"]])
    assert p.vertices == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert ForestPath.decode(m, P, p.encode()).components == p.components
    with pytest.raises(ForestPathError):
        ForestPath.decode(m, P, [m.id_of("s")])


def test_examples():
    t = catalog.trivial()
    p = ForestPath(t, EdgeSelector(t), [[0]] * 4)
    assert is_good_forest_path(p, 0, 0).good
    m = catalog.mpath()
    P = EdgeSelector.middle_in(m, ["s"])
    ss = ForestPath(m, P, [["s", "s"], ["s", "s"]])
    one = m.identity
    g = is_good_forest_path(ss, one, one)
    assert not g.good and g.core
    assert is_good_exhaustive(ss, one, one) is None
    assert is_bad_forest_path(ss) is not None


def test_single_component_is_always_bad():
    # the first block must go left and the last one right
    t = catalog.trivial()
    p = ForestPath(t, EdgeSelector(t), [[0]])
    assert not is_good_forest_path(p).good
    assert is_bad_forest_path(p) == (0, 0)


def test_min3_length_two_paths_can_be_bad():
    # Only paths with more than two components are ruled out for totally
    # ordered monoids; with two components the whole middle copy sits
    # between the blocks.
    m = catalog.min3()
    one, three = m.id_of("1"), m.id_of("3")
    P = EdgeSelector(m, [(one, three, one)])
    p = ForestPath(m, P, [["1"], ["3", "1"]])
    assert not is_good_forest_path(p, one, one).good
    assert is_good_exhaustive(p, one, one) is None


def test_min3_length_two_matches_exhaustive():
    rng = random.Random(7)
    m = catalog.min3()
    for _ in range(20):
        P = random_selector(m, rng)
        for p in enumerate_forest_paths(m, P, list(m.elements), 2, 2, min_components=2):
            for a, b in itertools.product(m.elements, repeat=2):
                assert is_good_forest_path(p, a, b).good == (is_good_exhaustive(p, a, b) is not None)


def test_two_sat_agrees_with_exhaustive():
    rng = random.Random(3)
    for m in (catalog.u1(), catalog.mpath(), catalog.sl2()):
        byv = words_by_value(m, list(m.elements), 2)
        for _ in range(20):
            P = random_selector(m, rng)
            e = rng.choice([x for x in m.idempotents if x in byv])
            p = ForestPath(m, P, [rng.choice(byv[e]) for _ in range(rng.randint(2, 4))], e)
            for a, b in itertools.product(m.elements, repeat=2):
                g = is_good_forest_path(p, a, b)
                assert g.good == (is_good_exhaustive(p, a, b) is not None)
                if g.good:
                    assert tripled_embedding_holds(p, a, b, g.assignment)


def test_cut_certificates_are_sound():
    rng = random.Random(5)
    m = catalog.min3()
    byv = words_by_value(m, list(m.elements), 2)
    for e in m.idempotents:
        ws = byv[e]
        tables = CutTables(m, e, ws)
        cert = tables.certified(3)
        for idx in itertools.product(range(len(ws)), repeat=3):
            P = random_selector(m, rng)
            p = ForestPath(m, P, [ws[i] for i in idx], e)
            c = cut_certificate(p)
            assert (c is not None) == bool(cert[idx])
            if c is not None:
                for a, b in itertools.product(m.elements, repeat=2):
                    assert tripled_embedding_holds(p, a, b, c)


def test_to_json():
    m = catalog.mpath()
    p = ForestPath(m, EdgeSelector(m), [["s", "s"], ["z"]])
    assert p.to_json() == {"idempotent": "z", "components": [["s", "s"], ["z"]]}
