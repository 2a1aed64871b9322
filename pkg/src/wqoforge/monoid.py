"""Finite monoids given by multiplication tables, plus Green ideals.

Elements are dense integer ids ``0..n-1``; names are kept only for display
and serialisation.  Every monoid is checked for associativity and for a
two-sided identity when constructed, and is immutable afterwards.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np


class MonoidError(ValueError):
    pass


class NotAssociative(MonoidError):
    def __init__(self, triple):
        self.witness = triple
        super().__init__(f"table is not associative at (x, y, z) = {triple}")


class BadIdentity(MonoidError):
    def __init__(self, element):
        self.witness = element
        super().__init__(f"declared identity does not act trivially on {element!r}")


class InconsistentCriteria(AssertionError):
    """The four ideal-based total-order criteria disagreed (should never happen)."""


class FiniteMonoid:
    """A finite monoid over element ids ``0..n-1``.

    ``table[x][y]`` is the id of ``x * y``.
    """

    def __init__(self, table, identity: int, names: Sequence[str] | None = None, check: bool = True):
        arr = np.asarray(table, dtype=np.int64)
        n = arr.shape[0]
        if arr.ndim != 2 or arr.shape != (n, n):
            raise MonoidError("multiplication table must be square")
        if n == 0:
            raise MonoidError("a monoid has at least one element")
        if arr.min() < 0 or arr.max() >= n:
            raise MonoidError("table entries must be element ids")
        if not 0 <= identity < n:
            raise MonoidError("identity must be an element id")
        self.size = n
        self.identity = int(identity)
        self.table = arr
        self.table.setflags(write=False)
        self._rows = [list(map(int, row)) for row in arr]
        if names is None:
            names = [str(i) for i in range(n)]
        if len(names) != n or len(set(names)) != n:
            raise MonoidError("element names must be distinct, one per element")
        self.names = tuple(str(x) for x in names)
        self._index = {name: i for i, name in enumerate(self.names)}
        if check:
            self._check()

    def _check(self):
        t = self.table
        one = self.identity
        for x in range(self.size):
            if t[one, x] != x or t[x, one] != x:
                raise BadIdentity(self.names[x])
        # (xy)z vs x(yz) for all triples at once
        left = t[t[:, :, None], np.arange(self.size)[None, None, :]]
        right = t[np.arange(self.size)[:, None, None], t[None, :, :]]
        bad = np.argwhere(left != right)
        if len(bad):
            x, y, z = (self.names[int(i)] for i in bad[0])
            raise NotAssociative((x, y, z))

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"FiniteMonoid(size={self.size}, elements={list(self.names)})"

    @property
    def elements(self) -> range:
        return range(self.size)

    def mul(self, x: int, y: int) -> int:
        return self._rows[x][y]

    def product(self, xs: Iterable[int]) -> int:
        acc = self.identity
        rows = self._rows
        for x in xs:
            acc = rows[acc][x]
        return acc

    def power(self, x: int, k: int) -> int:
        acc = self.identity
        for _ in range(k):
            acc = self._rows[acc][x]
        return acc

    def id_of(self, name: str | int) -> int:
        if isinstance(name, (int, np.integer)):
            if not 0 <= name < self.size:
                raise KeyError(name)
            return int(name)
        return self._index[str(name)]

    def name(self, x: int) -> str:
        return self.names[x]

    def is_idempotent(self, x: int) -> bool:
        return self._rows[x][x] == x

    @cached_property
    def idempotents(self) -> tuple[int, ...]:
        return tuple(x for x in self.elements if self.is_idempotent(x))

    # --- Green ideals ------------------------------------------------------

    @cached_property
    def right_ideals(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(self._rows[x]) for x in self.elements)

    @cached_property
    def left_ideals(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(int(v) for v in self.table[:, x]) for x in self.elements)

    @cached_property
    def two_sided_ideals(self) -> tuple[frozenset, ...]:
        t = self.table
        return tuple(frozenset(int(v) for v in np.unique(t[t[:, x]][:, :])) for x in self.elements)

    @cached_property
    def j_leq_matrix(self) -> np.ndarray:
        """``m[x, y]`` is True iff J(x) is included in J(y)."""
        J = self.two_sided_ideals
        m = np.array([[J[x] <= J[y] for y in self.elements] for x in self.elements], dtype=bool)
        m.setflags(write=False)
        return m

    def j_leq(self, x: int, y: int) -> bool:
        return bool(self.j_leq_matrix[x, y])

    def j_equiv(self, x: int, y: int) -> bool:
        return self.two_sided_ideals[x] == self.two_sided_ideals[y]

    @cached_property
    def j_classes(self) -> tuple[tuple[int, ...], ...]:
        seen: dict[frozenset, list[int]] = {}
        for x in self.elements:
            seen.setdefault(self.two_sided_ideals[x], []).append(x)
        # larger ideals first: the class of the identity leads
        classes = sorted(seen.items(), key=lambda kv: (-len(kv[0]), min(kv[1])))
        return tuple(tuple(v) for _, v in classes)

    def j_class_of(self, x: int) -> tuple[int, ...]:
        for c in self.j_classes:
            if x in c:
                return c
        raise KeyError(x)

    def opposite(self) -> "FiniteMonoid":
        return FiniteMonoid(self.table.T.copy(), self.identity, self.names, check=False)

    def to_json(self) -> dict:
        return {
            "elements": list(self.names),
            "identity": self.names[self.identity],
            "table": [[self.names[v] for v in row] for row in self._rows],
        }


def make_monoid(elements: Sequence[Hashable], table, identity: Hashable) -> FiniteMonoid:
    """Build a monoid from named elements and a table of names (or ids)."""
    names = [str(e) for e in elements]
    index = {name: i for i, name in enumerate(names)}

    def lookup(v):
        if isinstance(v, (int, np.integer)) and str(v) not in index:
            return int(v)
        return index[str(v)]

    if len(table) != len(names) or any(len(row) != len(names) for row in table):
        raise MonoidError("table must be |elements| x |elements|")
    ids = [[lookup(v) for v in row] for row in table]
    return FiniteMonoid(ids, lookup(identity), names)


def monoid_from_json(doc: dict) -> FiniteMonoid:
    if "q" in doc:
        return transformation_monoid(doc["q"], doc["generators"])
    return make_monoid(doc["elements"], doc["table"], doc["identity"])


# --- transformation monoids -------------------------------------------------


def transformation_name(f: Sequence[int]) -> str:
    return "[" + ",".join(str(v) for v in f) + "]"


def compose(f: Sequence[int], g: Sequence[int]) -> tuple[int, ...]:
    """``f o g``: apply ``g`` first, then ``f``."""
    return tuple(f[g[q]] for q in range(len(g)))


def transformation_monoid(q: int, generators: Iterable[Sequence[int]]) -> FiniteMonoid:
    """Closure of ``generators`` and the identity on ``{0..q-1}`` under composition.

    The monoid product is ``x * y = x o y`` (apply ``y`` first).  Elements
    are named by their image lists, e.g. ``[0,0]`` for the constant map to 0.
    """
    gens = []
    for g in generators:
        g = tuple(int(v) for v in g)
        if len(g) != q or any(not 0 <= v < q for v in g):
            raise MonoidError(f"generator {list(g)} is not a total function on {q} points")
        gens.append(g)
    ident = tuple(range(q))
    elems = [ident]
    seen = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for f in frontier:
            for g in gens:
                h = compose(f, g)
                if h not in seen:
                    seen[h] = len(elems)
                    elems.append(h)
                    nxt.append(h)
        frontier = nxt
    # canonical order: identity first, then lexicographic by function graph
    order = [ident] + sorted(e for e in elems if e != ident)
    idx = {f: i for i, f in enumerate(order)}
    table = [[idx[compose(f, g)] for g in order] for f in order]
    m = FiniteMonoid(table, 0, [transformation_name(f) for f in order])
    m.functions = tuple(order)
    return m


def dali_leq(f: Sequence[int], g: Sequence[int]) -> bool:
    """``Im(f)`` included in ``Im(f o g)`` (``g`` applied first)."""
    return set(f) <= set(compose(f, g))


# --- Green report -------------------------------------------------------------


@dataclass(frozen=True)
class GreenReport:
    right: tuple[frozenset, ...]
    left: tuple[frozenset, ...]
    two_sided: tuple[frozenset, ...]
    j_leq: np.ndarray
    j_classes: tuple[tuple[int, ...], ...]

    def to_json(self, m: FiniteMonoid) -> dict:
        def names(s):
            return sorted(m.names[v] for v in s)

        return {
            "R": {m.names[x]: names(self.right[x]) for x in m.elements},
            "L": {m.names[x]: names(self.left[x]) for x in m.elements},
            "J": {m.names[x]: names(self.two_sided[x]) for x in m.elements},
            "j_classes": [[m.names[v] for v in c] for c in self.j_classes],
        }


def green_report(m: FiniteMonoid) -> GreenReport:
    return GreenReport(m.right_ideals, m.left_ideals, m.two_sided_ideals, m.j_leq_matrix, m.j_classes)


# --- totally ordered monoids -------------------------------------------------


@dataclass(frozen=True)
class TotalOrderVerdict:
    totally_ordered: bool
    witness: tuple[int, int] | None = None

    def __bool__(self):
        return self.totally_ordered


def _is_total(m: FiniteMonoid, leq) -> bool:
    return all(leq(x, y) or leq(y, x) for x in m.elements for y in m.elements)


def total_order_criteria(m: FiniteMonoid) -> dict[str, bool]:
    """Evaluate the four ideal-based characterisations of total ordering.

    ``right``: x <= y iff R(x) in R(xy) is total; ``left``: x <= y iff
    L(x) in L(yx) is total; ``two_sided``: x <= y iff J(x) = J(xy) = J(yx)
    is total; ``lattice``: J-ideals form a chain and J(xy) = J(x) & J(y).
    """
    R, L, J = m.right_ideals, m.left_ideals, m.two_sided_ideals
    mul = m.mul
    right = _is_total(m, lambda x, y: R[x] <= R[mul(x, y)])
    left = _is_total(m, lambda x, y: L[x] <= L[mul(y, x)])
    two = _is_total(m, lambda x, y: J[x] == J[mul(x, y)] == J[mul(y, x)])
    chain = all(J[x] <= J[y] or J[y] <= J[x] for x in m.elements for y in m.elements)
    meet = all(J[mul(x, y)] == J[x] & J[y] for x in m.elements for y in m.elements)
    return {"right": right, "left": left, "two_sided": two, "lattice": chain and meet}


def is_totally_ordered(m: FiniteMonoid) -> TotalOrderVerdict:
    """For all a, b: J(ab) = J(a) or J(ab) = J(b).

    The three other characterisations are evaluated as well; any
    disagreement raises :class:`InconsistentCriteria`.
    """
    J = m.two_sided_ideals
    witness = None
    for a, b in itertools.product(m.elements, repeat=2):
        ab = m.mul(a, b)
        if J[ab] != J[a] and J[ab] != J[b]:
            witness = (a, b)
            break
    verdict = witness is None
    others = total_order_criteria(m)
    if any(v != verdict for v in others.values()):
        raise InconsistentCriteria(f"definition says {verdict}, criteria say {others}")
    funcs = getattr(m, "functions", None)
    if funcs is not None:
        dali = all(
            dali_leq(f, g) or dali_leq(g, f) for f in funcs for g in funcs
        )
        if dali != verdict:
            raise InconsistentCriteria(f"definition says {verdict}, image order totality says {dali}")
    return TotalOrderVerdict(verdict, witness)


def stable_power(m: FiniteMonoid, x: int) -> tuple[int, int]:
    """Least ``k >= 1`` with ``x**k`` idempotent, and that idempotent."""
    acc = x
    for k in range(1, m.size + 2):
        if m.is_idempotent(acc):
            return k, acc
        acc = m.mul(acc, x)
    raise AssertionError("unreachable: some power of x is idempotent")


def right_ideal_hypothesis(m: FiniteMonoid) -> bool:
    """For all x, y: R(x) in R(xy) or R(y) in R(xy)."""
    R = m.right_ideals
    return all(
        R[x] <= R[m.mul(x, y)] or R[y] <= R[m.mul(x, y)] for x in m.elements for y in m.elements
    )


def periodic_exponent(m: FiniteMonoid) -> int | None:
    """Least ``k >= 2`` with ``x**k = x`` for every ``x``, if any."""
    for k in range(2, m.size + 2):
        if all(m.power(x, k) == x for x in m.elements):
            return k
    return None


def cancellation_witnesses(m: FiniteMonoid) -> list[tuple[str, int, int, int]]:
    """Triples violating left or right cancellation.

    ``("left", a, b, c)``: b <=J a, abc = ab, bc != b.
    ``("right", a, b, c)``: b <=J a, cba = ba, cb != b.
    """
    mul = m.mul
    out = []
    for a, b, c in itertools.product(m.elements, repeat=3):
        if not m.j_leq(b, a):
            continue
        ab, ba = mul(a, b), mul(b, a)
        if mul(ab, c) == ab and mul(b, c) != b:
            out.append(("left", a, b, c))
        if mul(c, ba) == ba and mul(c, b) != b:
            out.append(("right", a, b, c))
    return out


# --- morphisms ---------------------------------------------------------------


class MonoidMorphism:
    """A letter-to-element map, extended multiplicatively to words."""

    def __init__(self, alphabet: Sequence[Hashable], target: FiniteMonoid, images: dict):
        self.alphabet = tuple(alphabet)
        self.target = target
        missing = [a for a in self.alphabet if a not in images]
        if missing:
            raise MonoidError(f"no image for letters {missing}")
        self.images = {a: target.id_of(images[a]) for a in self.alphabet}

    def __call__(self, word: Iterable[Hashable]) -> int:
        return self.target.product(self.images[a] for a in word)

    def letters(self, word: Iterable[Hashable]) -> list[int]:
        return [self.images[a] for a in word]

    def to_json(self) -> dict:
        return {str(a): self.target.names[v] for a, v in self.images.items()}


def direct_product(m1: FiniteMonoid, m2: FiniteMonoid) -> FiniteMonoid:
    pairs = list(itertools.product(m1.elements, m2.elements))
    idx = {p: i for i, p in enumerate(pairs)}
    table = [[idx[(m1.mul(a, c), m2.mul(b, d))] for (c, d) in pairs] for (a, b) in pairs]
    names = [f"({m1.names[a]},{m2.names[b]})" for a, b in pairs]
    return FiniteMonoid(table, idx[(m1.identity, m2.identity)], names)
