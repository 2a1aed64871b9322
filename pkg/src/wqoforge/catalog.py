"""Small named monoids used throughout the tests and examples."""

from __future__ import annotations

import itertools

from .monoid import FiniteMonoid, make_monoid, transformation_monoid


def trivial() -> FiniteMonoid:
    return make_monoid(["1"], [["1"]], "1")


def u1() -> FiniteMonoid:
    """{1, 0} with 0 absorbing."""
    return make_monoid(["1", "0"], [["1", "0"], ["0", "0"]], "1")


def min_monoid(n: int) -> FiniteMonoid:
    """({1..n}, min) with identity n."""
    els = [str(i) for i in range(1, n + 1)]
    table = [[str(min(a, b)) for b in range(1, n + 1)] for a in range(1, n + 1)]
    return make_monoid(els, table, str(n))


def min3() -> FiniteMonoid:
    return min_monoid(3)


def sl2() -> FiniteMonoid:
    """Subsets of {x, y} under union."""
    subsets = [frozenset(), frozenset("x"), frozenset("y"), frozenset("xy")]

    def nm(s):
        return "{" + ",".join(sorted(s)) + "}"

    els = [nm(s) for s in subsets]
    table = [[nm(a | b) for b in subsets] for a in subsets]
    return make_monoid(els, table, "{}")


def mpath() -> FiniteMonoid:
    """{1, s, z}: s*s = z, z absorbing."""
    t = {
        ("1", "1"): "1", ("1", "s"): "s", ("1", "z"): "z",
        ("s", "1"): "s", ("s", "s"): "z", ("s", "z"): "z",
        ("z", "1"): "z", ("z", "s"): "z", ("z", "z"): "z",
    }
    els = ["1", "s", "z"]
    return make_monoid(els, [[t[(a, b)] for b in els] for a in els], "1")


def cyclic(n: int) -> FiniteMonoid:
    els = [str(i) for i in range(n)]
    return make_monoid(els, [[str((a + b) % n) for b in range(n)] for a in range(n)], "0")


def gap_to_tm_monoid(m: int) -> FiniteMonoid:
    """({1..m}, min) x ({1..m}, right projection), with an identity adjoined.

    The product has no neutral element once m >= 2 (right projection has
    none), so a fresh identity ``1`` is added; for m = 1 the product is
    already the trivial monoid.  Pairs are named ``(a,b)``.
    """
    if m < 1:
        raise ValueError("m must be positive")
    pairs = list(itertools.product(range(1, m + 1), repeat=2))
    if m == 1:
        return make_monoid(["(1,1)"], [["(1,1)"]], "(1,1)")

    def nm(p):
        return f"({p[0]},{p[1]})"

    els = ["1"] + [nm(p) for p in pairs]
    table = [["1"] + [nm(p) for p in pairs]]
    for a, b in pairs:
        table.append([nm((a, b))] + [nm((min(a, c), d)) for c, d in pairs])
    return make_monoid(els, table, "1")


def small_transformation_monoids(max_points: int = 3, max_generators: int = 2):
    """Yield ``(q, generators, monoid)`` for every multiset of at most
    ``max_generators`` endofunctions of ``{0..q-1}``, ``1 <= q <= max_points``."""
    for q in range(1, max_points + 1):
        funcs = list(itertools.product(range(q), repeat=q))
        for k in range(max_generators + 1):
            for gens in itertools.combinations_with_replacement(funcs, k):
                yield q, gens, transformation_monoid(q, gens)


NAMED = {
    "trivial": trivial,
    "U1": u1,
    "min3": min3,
    "SL2": sl2,
    "Mpath": mpath,
    "Z2": lambda: cyclic(2),
    "min2": lambda: min_monoid(2),
    "gap2": lambda: gap_to_tm_monoid(2),
    "gap3": lambda: gap_to_tm_monoid(3),
}


def named(name: str) -> FiniteMonoid:
    try:
        return NAMED[name]()
    except KeyError:
        raise KeyError(f"unknown builtin monoid {name!r}; known: {sorted(NAMED)}") from None
