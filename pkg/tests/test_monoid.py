import itertools

import pytest

from wqoforge import catalog
from wqoforge.monoid import (
    BadIdentity,
    FiniteMonoid,
    MonoidError,
    MonoidMorphism,
    NotAssociative,
    cancellation_witnesses,
    compose,
    dali_leq,
    direct_product,
    green_report,
    is_totally_ordered,
    make_monoid,
    monoid_from_json,
    periodic_exponent,
    right_ideal_hypothesis,
    stable_power,
    total_order_criteria,
    transformation_monoid,
)


def test_u1_and_min3_build():
    assert catalog.u1().size == 2
    m = catalog.min3()
    assert m.size == 3 and m.names[m.identity] == "3"
    assert m.mul(m.id_of("2"), m.id_of("1")) == m.id_of("1")


def test_not_associative():
    # x*y = y - x mod 3 style table that breaks associativity, identity 0 ok on both sides
    table = [[0, 1, 2], [1, 2, 1], [2, 0, 0]]
    with pytest.raises(NotAssociative):
        FiniteMonoid(table, 0)


def test_bad_identity_and_shape():
    with pytest.raises(BadIdentity):
        FiniteMonoid([[0, 0], [0, 0]], 1)
    with pytest.raises(MonoidError):
        FiniteMonoid([[0, 1]], 0)
    with pytest.raises(MonoidError):
        make_monoid(["a", "b"], [["a"]], "a")


def test_transformation_examples():
    # Q = {1,2} written as {0,1}
    assert transformation_monoid(2, [(0, 0)]).size == 2
    assert transformation_monoid(2, [(0, 0), (1, 1)]).size == 3
    swap = transformation_monoid(2, [(1, 0)])
    assert swap.size == 2
    s = swap.id_of("[1,0]")
    assert swap.mul(s, s) == swap.identity
    with pytest.raises(MonoidError):
        transformation_monoid(2, [(0, 2)])


def test_transformation_product_applies_right_factor_first():
    m = transformation_monoid(3, [(1, 2, 0), (0, 0, 2)])
    for x, y in itertools.product(m.elements, repeat=2):
        assert m.functions[m.mul(x, y)] == compose(m.functions[x], m.functions[y])


def test_green_examples():
    u1 = catalog.u1()
    J = u1.two_sided_ideals
    assert J[u1.id_of("0")] == {u1.id_of("0")}
    assert J[u1.id_of("1")] == set(u1.elements)
    m = catalog.min3()
    assert {m.names[x] for x in m.two_sided_ideals[m.id_of("2")]} == {"1", "2"}
    for mon in (u1, m, catalog.sl2(), catalog.mpath()):
        assert mon.two_sided_ideals[mon.identity] == set(mon.elements)
        for x in mon.elements:
            assert x in mon.right_ideals[x] and x in mon.left_ideals[x]
            assert mon.right_ideals[x] <= mon.two_sided_ideals[x]
            assert mon.left_ideals[x] <= mon.two_sided_ideals[x]
            assert mon.j_leq(x, x)
        for x, y, z in itertools.product(mon.elements, repeat=3):
            if mon.j_leq(x, y) and mon.j_leq(y, z):
                assert mon.j_leq(x, z)


def test_green_report_json():
    doc = green_report(catalog.mpath()).to_json(catalog.mpath())
    assert doc["J"]["s"] == ["s", "z"]
    assert sorted(map(tuple, doc["j_classes"])) == [("1",), ("s",), ("z",)]


def test_totally_ordered_examples():
    assert is_totally_ordered(catalog.min3())
    sl2 = catalog.sl2()
    v = is_totally_ordered(sl2)
    assert not v
    a, b = v.witness
    assert {sl2.names[a], sl2.names[b]} == {"{x}", "{y}"}
    mp = catalog.mpath()
    v = is_totally_ordered(mp)
    assert not v and v.witness == (mp.id_of("s"), mp.id_of("s"))
    assert all(total_order_criteria(catalog.min3()).values())


def test_dali_examples():
    assert dali_leq((0, 1), (0, 1))
    assert dali_leq((0, 0), (1, 1))
    assert not dali_leq((0, 1), (0, 0))


def test_stable_power():
    m = catalog.min3()
    assert stable_power(m, m.id_of("2")) == (1, m.id_of("2"))
    mp = catalog.mpath()
    assert stable_power(mp, mp.id_of("s")) == (2, mp.id_of("z"))
    sw = transformation_monoid(2, [(1, 0)])
    assert stable_power(sw, sw.id_of("[1,0]")) == (2, sw.identity)


def test_cancellation_and_friends():
    assert cancellation_witnesses(catalog.min3()) == []
    assert cancellation_witnesses(catalog.u1()) == []
    assert isinstance(cancellation_witnesses(catalog.sl2()), list)
    assert right_ideal_hypothesis(catalog.min3())
    assert periodic_exponent(catalog.cyclic(2)) == 3
    assert periodic_exponent(catalog.mpath()) is None


def test_pseudo_inverse_under_right_ideal_hypothesis():
    for _, _, m in catalog.small_transformation_monoids(3, 2):
        if not right_ideal_hypothesis(m):
            continue
        for x, y in itertools.product(m.elements, repeat=2):
            xy, yx = m.mul(x, y), m.mul(y, x)
            assert any(
                m.mul(m.power(xy, k), x) == x or m.mul(m.power(yx, k), y) == y for k in range(1, m.size + 2)
            )


def test_json_round_trip_and_morphism():
    m = catalog.mpath()
    again = monoid_from_json(m.to_json())
    assert again.names == m.names and (again.table == m.table).all()
    t = monoid_from_json({"q": 2, "generators": [[0, 0]]})
    assert t.size == 2
    mu = MonoidMorphism(["a"], m, {"a": "s"})
    assert m.names[mu("aa")] == "z"
    assert mu.to_json() == {"a": "s"}
    with pytest.raises(MonoidError):
        MonoidMorphism(["a", "b"], m, {"a": "s"})


def test_direct_product():
    p = direct_product(catalog.min_monoid(2), catalog.u1())
    assert p.size == 4
    assert p.names[p.identity] == "(2,1)"


def test_gap_monoid():
    g = catalog.gap_to_tm_monoid(2)
    assert is_totally_ordered(g)
    assert g.size == 5  # four pairs plus an adjoined identity
    assert catalog.gap_to_tm_monoid(1).size == 1
    a, b = g.id_of("(1,2)"), g.id_of("(2,1)")
    assert g.names[g.mul(a, b)] == "(1,1)"
