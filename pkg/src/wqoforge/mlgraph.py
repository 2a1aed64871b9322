"""Monoid-labelled graphs in word form, products, and factorisation forests.

A word graph over ``(M, P)`` is a sequence of monoid elements
``m_1 .. m_k``; vertex ``i`` (1-based) carries ``l_i = m_1..m_i`` and
``r_i = m_{i+1}..m_k``.  In a context ``(a, b)`` vertices ``i < j`` are
adjacent iff ``(a l_i, m_{i+1}..m_j, r_j b)`` is in ``P``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graphs import LabelledGraph
from .monoid import FiniteMonoid, MonoidMorphism


class MonoidMismatch(ValueError):
    pass


class NotIdempotent(ValueError):
    pass


class UnequalEvaluations(ValueError):
    pass


class EdgeSelector:
    """A subset of ``M x M x M`` stored as a boolean cube."""

    def __init__(self, monoid: FiniteMonoid, triples: Iterable[tuple] = (), cube=None):
        self.monoid = monoid
        n = monoid.size
        if cube is not None:
            self.cube = np.array(cube, dtype=bool)
            if self.cube.shape != (n, n, n):
                raise ValueError("selector cube has the wrong shape")
        else:
            self.cube = np.zeros((n, n, n), dtype=bool)
            for t in triples:
                if len(t) != 3:
                    raise ValueError(f"selector entries are triples, got {t!r}")
                p, m, s = (monoid.id_of(x) for x in t)
                self.cube[p, m, s] = True
        self.cube.setflags(write=False)
        self._set = frozenset(map(tuple, np.argwhere(self.cube).tolist()))

    @classmethod
    def from_predicate(cls, monoid: FiniteMonoid, pred) -> "EdgeSelector":
        n = monoid.size
        cube = [[[bool(pred(p, m, s)) for s in range(n)] for m in range(n)] for p in range(n)]
        return cls(monoid, cube=cube)

    @classmethod
    def middle_in(cls, monoid: FiniteMonoid, mids: Iterable) -> "EdgeSelector":
        """``{(x, y, z) : y in mids}``."""
        ids = {monoid.id_of(m) for m in mids}
        return cls.from_predicate(monoid, lambda p, m, s: m in ids)

    def __contains__(self, t) -> bool:
        return t in self._set

    def __len__(self):
        return len(self._set)

    def __eq__(self, other):
        return isinstance(other, EdgeSelector) and self.monoid is other.monoid and self._set == other._set

    def __hash__(self):
        return hash(self._set)

    def triples(self) -> list[tuple[int, int, int]]:
        return sorted(self._set)

    def to_json(self) -> list:
        nm = self.monoid.names
        return [[nm[p], nm[m], nm[s]] for p, m, s in self.triples()]


class WordGraph:
    def __init__(self, monoid: FiniteMonoid, pedge: EdgeSelector, letters: Sequence, boundaries: Sequence[int] | None = None):
        if pedge.monoid is not monoid and pedge.monoid.table.tolist() != monoid.table.tolist():
            raise MonoidMismatch("edge selector is over another monoid")
        self.monoid = monoid
        self.pedge = pedge
        self.letters = tuple(monoid.id_of(x) for x in letters)
        self.boundaries = tuple(boundaries) if boundaries is not None else None
        mul = monoid.mul
        pre = [monoid.identity]
        for x in self.letters:
            pre.append(mul(pre[-1], x))
        suf = [monoid.identity]
        for x in reversed(self.letters):
            suf.append(mul(x, suf[-1]))
        suf.reverse()
        # l[i], r[i] for 1-based vertex i
        self._pre = pre
        self._suf = suf
        self.value = pre[-1]

    def __len__(self):
        return len(self.letters)

    def __repr__(self):
        names = " ".join(self.monoid.names[x] for x in self.letters)
        return f"WordGraph[{names}]"

    @property
    def vertices(self) -> range:
        return range(1, len(self.letters) + 1)

    def l(self, i: int) -> int:
        return self._pre[i]

    def r(self, i: int) -> int:
        return self._suf[i]

    def infix(self, i: int, j: int) -> int:
        """Product of letters at positions ``i+1 .. j`` (1-based)."""
        return self.monoid.product(self.letters[i:j])

    def edge(self, i: int, j: int, a: int | None = None, b: int | None = None) -> bool:
        m = self.monoid
        a = m.identity if a is None else a
        b = m.identity if b is None else b
        if i == j:
            return False
        if i > j:
            i, j = j, i
        return (m.mul(a, self._pre[i]), self.infix(i, j), m.mul(self._suf[j], b)) in self.pedge

    def labels(self, a: int | None = None, b: int | None = None) -> dict:
        m = self.monoid
        a = m.identity if a is None else a
        b = m.identity if b is None else b
        return {i: (m.mul(a, self._pre[i]), m.mul(self._suf[i], b)) for i in self.vertices}

    def check_invariants(self) -> bool:
        m = self.monoid
        return all(m.mul(self._pre[i], self._suf[i]) == self.value for i in range(len(self.letters) + 1))

    def to_json(self) -> dict:
        nm = self.monoid.names
        return {"letters": [nm[x] for x in self.letters], "pedge": self.pedge.to_json()}


def word_graph(monoid: FiniteMonoid, pedge: EdgeSelector, letters: Sequence) -> WordGraph:
    return WordGraph(monoid, pedge, letters)


def downcast(g: WordGraph, a=None, b=None) -> LabelledGraph:
    """The labelled graph of ``g`` in context ``(a, b)``.

    Vertices are positions ``1..k``; labels are ``(a l_i, r_i b)`` as id pairs.
    """
    m = g.monoid
    a = m.identity if a is None else m.id_of(a)
    b = m.identity if b is None else m.id_of(b)
    k = len(g)
    mul = m.mul
    edges = []
    pe = g.pedge
    for i in range(1, k + 1):
        pre = mul(a, g.l(i))
        mid = m.identity
        for j in range(i + 1, k + 1):
            mid = mul(mid, g.letters[j - 1])
            if (pre, mid, mul(g.r(j), b)) in pe:
                edges.append((i, j))
    return LabelledGraph.build(range(1, k + 1), edges, g.labels(a, b))


def binary_product(g1: WordGraph, g2: WordGraph) -> WordGraph:
    if g1.monoid is not g2.monoid or g1.pedge != g2.pedge:
        raise MonoidMismatch("binary product needs a shared monoid and edge selector")
    return WordGraph(g1.monoid, g1.pedge, g1.letters + g2.letters)


def idempotent_product(parts: Sequence[WordGraph]) -> WordGraph:
    if not parts:
        raise ValueError("idempotent product of an empty family")
    m = parts[0].monoid
    e = parts[0].value
    for p in parts:
        if p.monoid is not m or p.pedge != parts[0].pedge:
            raise MonoidMismatch("components must share the monoid and edge selector")
        if p.value != e:
            raise UnequalEvaluations(f"components evaluate to {m.names[e]} and {m.names[p.value]}")
    if not m.is_idempotent(e):
        raise NotIdempotent(f"{m.names[e]} is not idempotent")
    letters = tuple(itertools.chain.from_iterable(p.letters for p in parts))
    bounds = tuple(itertools.accumulate(len(p) for p in parts))
    return WordGraph(m, parts[0].pedge, letters, boundaries=bounds)


# --- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    letter: int
    value: int

    depth = 0

    def leaves(self):
        yield self.letter


@dataclass(frozen=True)
class Binary:
    left: "Expr"
    right: "Expr"
    value: int
    depth: int

    def leaves(self):
        yield from self.left.leaves()
        yield from self.right.leaves()


@dataclass(frozen=True)
class Idem:
    children: tuple
    value: int
    depth: int

    def leaves(self):
        for c in self.children:
            yield from c.leaves()


Expr = Leaf | Binary | Idem


def leaf(m: FiniteMonoid, x: int) -> Leaf:
    return Leaf(x, x)


def binary(m: FiniteMonoid, left: Expr, right: Expr) -> Binary:
    return Binary(left, right, m.mul(left.value, right.value), 1 + max(left.depth, right.depth))


def idem(m: FiniteMonoid, children: Sequence[Expr]) -> Idem:
    children = tuple(children)
    if len(children) < 2:
        raise ValueError("idempotent nodes need at least two children")
    e = children[0].value
    if any(c.value != e for c in children):
        raise UnequalEvaluations("children of an idempotent node must share their evaluation")
    if not m.is_idempotent(e):
        raise NotIdempotent(f"{m.names[e]} is not idempotent")
    return Idem(children, e, 1 + max(c.depth for c in children))


def flatten(expr: Expr) -> list[int]:
    return list(expr.leaves())


def evaluate(m: FiniteMonoid, expr: Expr) -> int:
    """Recompute the value bottom-up (ignores the cached ``value``)."""
    if isinstance(expr, Leaf):
        return expr.letter
    if isinstance(expr, Binary):
        return m.mul(evaluate(m, expr.left), evaluate(m, expr.right))
    return m.product(evaluate(m, c) for c in expr.children)


def validate(m: FiniteMonoid, expr: Expr) -> bool:
    """Cached values, depths and idempotent-node conditions all consistent."""
    if isinstance(expr, Leaf):
        return expr.value == expr.letter
    if isinstance(expr, Binary):
        return (
            validate(m, expr.left)
            and validate(m, expr.right)
            and expr.value == m.mul(expr.left.value, expr.right.value)
            and expr.depth == 1 + max(expr.left.depth, expr.right.depth)
        )
    if len(expr.children) < 2 or not all(validate(m, c) for c in expr.children):
        return False
    e = expr.value
    return (
        m.is_idempotent(e)
        and all(c.value == e for c in expr.children)
        and expr.depth == 1 + max(c.depth for c in expr.children)
    )


def expr_to_json(m: FiniteMonoid, expr: Expr):
    if isinstance(expr, Leaf):
        return m.names[expr.letter]
    if isinstance(expr, Binary):
        return {"op": "binary", "value": m.names[expr.value], "children": [expr_to_json(m, expr.left), expr_to_json(m, expr.right)]}
    return {"op": "idempotent", "value": m.names[expr.value], "children": [expr_to_json(m, c) for c in expr.children]}


def expr_to_graph(expr: Expr, pedge: EdgeSelector) -> WordGraph:
    return WordGraph(pedge.monoid, pedge, flatten(expr))


# --- factorisation forests ---------------------------------------------------------


class _Forest:
    def __init__(self, m: FiniteMonoid):
        self.m = m
        J = m.two_sided_ideals
        self.J = J
        self.Rc = m.right_ideals
        self.Lc = m.left_ideals

    def in_group(self, vals: Sequence[int]) -> bool:
        """All values in one H-class that contains an idempotent."""
        r, l = self.Rc[vals[0]], self.Lc[vals[0]]
        if any(self.Rc[v] != r or self.Lc[v] != l for v in vals):
            return False
        return any(self.Rc[x] == r and self.Lc[x] == l for x in self.m.idempotents)

    def chain(self, parts: Sequence[Expr | None]) -> Expr:
        parts = [p for p in parts if p is not None]
        out = parts[0]
        for p in parts[1:]:
            out = binary(self.m, out, p)
        return out

    def word(self, w: Sequence[int]) -> Expr:
        m = self.m
        if len(w) == 1:
            return leaf(m, w[0])
        target = self.J[m.product(w)]
        blocks = []
        start = 0
        acc = m.identity
        for i, x in enumerate(w):
            nxt = m.mul(acc, x)
            if self.J[nxt] == target:
                head = w[start:i]
                blk = leaf(m, x) if not head else binary(m, self.word(head), leaf(m, x))
                blocks.append(blk)
                start = i + 1
                acc = m.identity
            else:
                acc = nxt
        rest = w[start:]
        smooth = self.smooth(blocks)
        return smooth if not rest else binary(m, smooth, self.word(rest))

    def smooth(self, items: Sequence[Expr]) -> Expr:
        """All values and all infix products lie in one regular J-class."""
        m = self.m
        if len(items) == 1:
            return items[0]
        vals = [it.value for it in items]
        if len(set(vals)) == 1 and m.is_idempotent(vals[0]):
            return idem(m, items)
        if self.in_group(vals):
            return self.group(items)
        types = [(self.Lc[vals[i]], self.Rc[vals[i + 1]]) for i in range(len(items) - 1)]
        counts = Counter(types)
        best = max(counts.values())
        tau = next(t for t in types if counts[t] == best)
        cuts = [i for i, t in enumerate(types) if t == tau]
        segs = []
        prev = 0
        for c in cuts:
            segs.append(items[prev : c + 1])
            prev = c + 1
        segs.append(items[prev:])
        head, middle, tail = segs[0], segs[1:-1], segs[-1]
        mid_expr = self.group([self.smooth(s) for s in middle]) if middle else None
        return self.chain([self.smooth(head), mid_expr, self.smooth(tail)])

    def group(self, items: Sequence[Expr]) -> Expr:
        """All values lie in one group H-class.

        Split after every position whose prefix value equals the value of
        the whole word; the pieces in between evaluate to the group
        identity, and each piece minus its last item has strictly fewer
        distinct prefix values.
        """
        m = self.m
        if len(items) == 1:
            return items[0]
        vals = [it.value for it in items]
        e = vals[0]
        while not m.is_idempotent(e):
            e = m.mul(e, vals[0])
        if all(v == e for v in vals):
            return idem(m, items)
        pre = []
        acc = e
        for v in vals:
            acc = m.mul(acc, v)
            pre.append(acc)
        occ = [k + 1 for k, p in enumerate(pre) if p == pre[-1]]

        def piece(lo, hi):
            body = items[lo : hi - 1]
            last = items[hi - 1]
            return last if not body else binary(m, self.group(body), last)

        first = piece(0, occ[0])
        loops = [piece(occ[k - 1], occ[k]) for k in range(1, len(occ))]
        if not loops:
            return first
        mid = loops[0] if len(loops) == 1 else idem(m, loops)
        return binary(m, first, mid)


def simon_forest(m: FiniteMonoid, mu: MonoidMorphism | None, word: Sequence) -> Expr | None:
    """Factorisation forest of ``word``; ``None`` for the empty word.

    With ``mu`` given, ``word`` is over its alphabet; otherwise it is a
    sequence of monoid elements (ids or names).
    """
    letters = mu.letters(word) if mu is not None else [m.id_of(x) for x in word]
    if not letters:
        return None
    return _Forest(m).word(letters)
