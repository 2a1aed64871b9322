"""Forest paths and the canonical goodness test.

A forest path is a sequence of nonempty words ``w_1 .. w_n`` over monoid
elements, all evaluating to one idempotent ``e``.  It is good in context
``(a, b)`` when the identity-on-positions map into the three-fold
repetition ``(w_1 .. w_n)^3`` can be made an induced, label-preserving
embedding by sending every vertex to the first or the third copy, with
``w_1`` in the first copy and ``w_n`` in the third.  The middle copy is
then never touched.

Vertices are pairs ``(i, p)``: component ``i`` and position ``p`` in it,
both 1-based.  Copy bits are ``False`` for the left copy and ``True`` for
the right one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import twosat
from .mlgraph import EdgeSelector, WordGraph, downcast
from .monoid import FiniteMonoid

LEFT, RIGHT = False, True


class ForestPathError(ValueError):
    pass


OPEN, CLOSE = "<", ">"


class ForestPath:
    def __init__(self, monoid: FiniteMonoid, pedge: EdgeSelector, components: Sequence[Sequence], idempotent=None):
        self.monoid = monoid
        self.pedge = pedge
        comps = tuple(tuple(monoid.id_of(x) for x in c) for c in components)
        if not comps:
            raise ForestPathError("a forest path has at least one component")
        if any(not c for c in comps):
            raise ForestPathError("components must be nonempty")
        vals = {monoid.product(c) for c in comps}
        if len(vals) != 1:
            raise ForestPathError("components evaluate to different elements: " + ", ".join(sorted(monoid.names[v] for v in vals)))
        e = vals.pop()
        if idempotent is not None and monoid.id_of(idempotent) != e:
            raise ForestPathError(f"components evaluate to {monoid.names[e]}, not {idempotent}")
        if not monoid.is_idempotent(e):
            raise ForestPathError(f"{monoid.names[e]} is not idempotent")
        self.components = comps
        self.e = e
        mul = monoid.mul
        self._lp = []
        self._rp = []
        for c in comps:
            lp = [monoid.identity]
            for x in c:
                lp.append(mul(lp[-1], x))
            rp = [monoid.identity]
            for x in reversed(c):
                rp.append(mul(x, rp[-1]))
            rp.reverse()
            self._lp.append(lp)
            self._rp.append(rp)

    def __len__(self):
        return len(self.components)

    def __repr__(self):
        nm = self.monoid.names
        return "ForestPath(" + " | ".join(" ".join(nm[x] for x in c) for c in self.components) + ")"

    @property
    def vertices(self) -> list[tuple[int, int]]:
        return [(i + 1, p + 1) for i, c in enumerate(self.components) for p in range(len(c))]

    def n_vertices(self) -> int:
        return sum(len(c) for c in self.components)

    def l(self, v) -> int:
        i, p = v
        return self._lp[i - 1][p]

    def r(self, v) -> int:
        i, p = v
        return self._rp[i - 1][p]

    def infix(self, i: int, p: int, q: int) -> int:
        return self.monoid.product(self.components[i - 1][p:q])

    def word_graph(self) -> WordGraph:
        return WordGraph(self.monoid, self.pedge, [x for c in self.components for x in c])

    def encode(self) -> tuple:
        out = []
        for c in self.components:
            out.append((OPEN, self.e))
            out.extend(c)
            out.append((CLOSE, self.e))
        return tuple(out)

    @classmethod
    def decode(cls, monoid, pedge, word: Iterable) -> "ForestPath":
        comps = []
        cur = None
        e = None
        for s in word:
            if isinstance(s, tuple) and s[0] == OPEN:
                if cur is not None:
                    raise ForestPathError("nested brackets")
                cur = []
                e = s[1] if e is None else e
                if s[1] != e:
                    raise ForestPathError("brackets carry different idempotents")
            elif isinstance(s, tuple) and s[0] == CLOSE:
                if cur is None or s[1] != e:
                    raise ForestPathError("unbalanced brackets")
                comps.append(cur)
                cur = None
            else:
                if cur is None:
                    raise ForestPathError("letter outside brackets")
                cur.append(s)
        if cur is not None:
            raise ForestPathError("unclosed bracket")
        return cls(monoid, pedge, comps, e)

    def to_json(self) -> dict:
        nm = self.monoid.names
        return {
            "idempotent": nm[self.e],
            "components": [[nm[x] for x in c] for c in self.components],
        }


# --- pair behaviour --------------------------------------------------------


def pair_table(path: ForestPath, a: int, b: int):
    """For every pair ``x < y`` the edge bit of the original and of the two
    split placements ``(x left, y right)`` and ``(x right, y left)``."""
    m = path.monoid
    mul = m.mul
    e = path.e
    P = path.pedge
    n = len(path)
    verts = path.vertices
    out = []
    for ix, x in enumerate(verts):
        i, p = x
        lx, rx = path.l(x), path.r(x)
        pre_x = mul(a, mul(e, lx)) if i > 1 else mul(a, lx)
        suf_x = mul(mul(rx, e), b) if i < n else mul(rx, b)
        for y in verts[ix + 1 :]:
            j, q = y
            ly, ry = path.l(y), path.r(y)
            pre_y = mul(a, mul(e, ly)) if j > 1 else mul(a, ly)
            suf_y = mul(mul(ry, e), b) if j < n else mul(ry, b)
            if i == j:
                mid = path.infix(i, p, q)
            elif j == i + 1:
                mid = mul(rx, ly)
            else:
                mid = mul(mul(rx, e), ly)
            orig = (pre_x, mid, suf_y) in P
            lr = (pre_x, mul(mul(rx, e), ly), suf_y) in P
            rl = (pre_y, mul(mul(ry, e), lx), suf_x) in P
            out.append((x, y, orig, lr, rl))
    return out


@dataclass(frozen=True)
class Goodness:
    good: bool
    context: tuple[int, int]
    assignment: dict | None = None
    # when bad: the clauses whose implication cycle forces a contradiction
    core: tuple = ()

    def __bool__(self):
        return self.good


def clauses_for(path: ForestPath, a: int, b: int) -> tuple[list, list]:
    """Variables and 2-clauses; ``True`` means right copy."""
    n = len(path)
    variables = path.vertices
    clauses = []
    for x in variables:
        if x[0] == 1:
            clauses.append(((x, LEFT), (x, LEFT)))
        if x[0] == n:
            clauses.append(((x, RIGHT), (x, RIGHT)))
    for x, y, orig, lr, rl in pair_table(path, a, b):
        if lr != orig:  # forbid x left, y right
            clauses.append(((x, RIGHT), (y, LEFT)))
        if rl != orig:  # forbid x right, y left
            clauses.append(((x, LEFT), (y, RIGHT)))
    return variables, clauses


def is_good_forest_path(path: ForestPath, a=None, b=None) -> Goodness:
    m = path.monoid
    a = m.identity if a is None else m.id_of(a)
    b = m.identity if b is None else m.id_of(b)
    variables, clauses = clauses_for(path, a, b)
    res = twosat.solve(variables, clauses)
    if res.satisfiable:
        return Goodness(True, (a, b), res.assignment)
    return Goodness(False, (a, b), None, (res.conflict_var, res.chain_to_false, res.chain_to_true))


def contexts(m: FiniteMonoid):
    return itertools.product(m.elements, repeat=2)


def is_bad_forest_path(path: ForestPath) -> tuple[int, int] | None:
    """First context (lexicographic in ids) in which the path is bad."""
    for a, b in contexts(path.monoid):
        if not is_good_forest_path(path, a, b).good:
            return (a, b)
    return None


# --- independent oracles ---------------------------------------------------------


def tripled_embedding_holds(path: ForestPath, a: int, b: int, assignment: dict) -> bool:
    """Check an assignment by building both graphs explicitly."""
    m = path.monoid
    comps = path.components
    n = len(comps)
    flat = [x for c in comps for x in c]
    g = downcast(WordGraph(m, path.pedge, flat), a, b)
    h = downcast(WordGraph(m, path.pedge, flat * 3), a, b)
    offs = list(itertools.accumulate([0] + [len(c) for c in comps]))
    total = offs[-1]
    f = {}
    for (i, p) in path.vertices:
        copy = 2 if assignment[(i, p)] else 0
        f[offs[i - 1] + p] = copy * total + offs[i - 1] + p
    if any(assignment[(1, p)] != LEFT for p in range(1, len(comps[0]) + 1)):
        return False
    if any(assignment[(n, p)] != RIGHT for p in range(1, len(comps[-1]) + 1)):
        return False
    for u in g.vertices:
        if g.labels[u] != h.labels[f[u]]:
            return False
    vs = list(g.vertices)
    for s, u in enumerate(vs):
        for w in vs[s + 1 :]:
            if g.has_edge(u, w) != h.has_edge(f[u], f[w]):
                return False
    return True


def is_good_exhaustive(path: ForestPath, a: int, b: int) -> dict | None:
    """Enumerate all copy assignments of inner vertices; first valid one."""
    n = len(path)
    if n == 1:
        return None
    inner = [v for v in path.vertices if 1 < v[0] < n]
    fixed = {v: (LEFT if v[0] == 1 else RIGHT) for v in path.vertices if v[0] in (1, n)}
    for bits in itertools.product((LEFT, RIGHT), repeat=len(inner)):
        asg = dict(fixed)
        asg.update(zip(inner, bits))
        if tripled_embedding_holds(path, a, b, asg):
            return asg
    return None


# --- enumeration ----------------------------------------------------------------


def words_by_value(m: FiniteMonoid, letters: Sequence[int], max_len: int) -> dict[int, list[tuple]]:
    out: dict[int, list[tuple]] = {}
    for k in range(1, max_len + 1):
        for w in itertools.product(letters, repeat=k):
            out.setdefault(m.product(w), []).append(w)
    return out


def enumerate_forest_paths(m: FiniteMonoid, pedge: EdgeSelector, letters: Sequence[int], max_components: int, max_len: int, min_components: int = 1):
    byv = words_by_value(m, letters, max_len)
    for e in m.idempotents:
        ws = byv.get(e, [])
        for n in range(min_components, max_components + 1):
            for comps in itertools.product(ws, repeat=n):
                yield ForestPath(m, pedge, comps, e)


# --- selector-independent certificates ---------------------------------------------


class CutTables:
    """Precomputed checks for placements that split a path at one cut.

    Everything before the cut goes left and everything after goes right.
    Such a placement only changes infix products of crossing pairs, and it
    is an embedding for every selector and context whenever each crossing
    infix already equals ``r_x e l_y``.
    """

    def __init__(self, m: FiniteMonoid, e: int, words: Sequence[tuple]):
        self.m, self.e, self.words = m, e, list(words)
        mul = m.mul
        W = len(self.words)
        pre = []
        suf = []
        for w in self.words:
            lp = [m.identity]
            for x in w:
                lp.append(mul(lp[-1], x))
            rp = [m.identity]
            for x in reversed(w):
                rp.append(mul(x, rp[-1]))
            rp.reverse()
            pre.append(lp)
            suf.append(rp)
        self.pre, self.suf = pre, suf
        # boundary cut between consecutive components u | v
        self.boundary = np.zeros((W, W), dtype=bool)
        for s, u in enumerate(self.words):
            for t, v in enumerate(self.words):
                self.boundary[s, t] = all(
                    mul(suf[s][p], pre[t][q]) == mul(mul(suf[s][p], e), pre[t][q])
                    for p in range(1, len(u) + 1)
                    for q in range(1, len(v) + 1)
                )
        # cut inside a word after position c (1 <= c < len)
        self.cuts = [list(range(1, len(w))) for w in self.words]
        self.inner_ok = [[self._inner(s, c) for c in self.cuts[s]] for s in range(W)]
        # left[s, t, c]: component s followed by word t cut at c
        maxc = max((len(c) for c in self.cuts), default=0)
        self.maxc = maxc
        self.left = np.zeros((W, W, max(maxc, 1)), dtype=bool)
        self.right = np.zeros((W, W, max(maxc, 1)), dtype=bool)
        for t, v in enumerate(self.words):
            for k, c in enumerate(self.cuts[t]):
                for s, u in enumerate(self.words):
                    # u entirely left, positions c+1.. of v right
                    self.left[s, t, k] = all(
                        mul(suf[s][p], pre[t][q]) == mul(mul(suf[s][p], e), pre[t][q])
                        for p in range(1, len(u) + 1)
                        for q in range(c + 1, len(v) + 1)
                    )
                    # positions ..c of v left, u (next component) entirely right
                    self.right[t, s, k] = all(
                        mul(suf[t][p], pre[s][q]) == mul(mul(suf[t][p], e), pre[s][q])
                        for p in range(1, c + 1)
                        for q in range(1, len(u) + 1)
                    )

    def _inner(self, s, c):
        m, e = self.m, self.e
        mul = m.mul
        w = self.words[s]
        pre, suf = self.pre[s], self.suf[s]
        for p in range(1, c + 1):
            for q in range(c + 1, len(w) + 1):
                mid = m.product(w[p:q])
                if mid != mul(mul(suf[p], e), pre[q]):
                    return False
        return True

    def inner_cut(self) -> np.ndarray:
        """``I[s, t, u]``: some cut inside middle word ``t`` works between ``s`` and ``u``."""
        W = len(self.words)
        out = np.zeros((W, W, W), dtype=bool)
        for t in range(W):
            for k, _ in enumerate(self.cuts[t]):
                if not self.inner_ok[t][k]:
                    continue
                out[:, t, :] |= self.left[:, t, k][:, None] & self.right[t, :, k][None, :]
        return out

    def certified(self, n: int) -> np.ndarray:
        """Boolean tensor over all n-tuples of words: a cut certificate exists."""
        W = len(self.words)
        B = self.boundary
        I = self.inner_cut() if n >= 3 else None
        out = np.zeros((W,) * n, dtype=bool)
        for k in range(n - 1):
            shape = [1] * n
            shape[k], shape[k + 1] = W, W
            out |= B.reshape(shape)
        for k in range(1, n - 1):
            shape = [1] * n
            shape[k - 1], shape[k], shape[k + 1] = W, W, W
            out |= I.reshape(shape)
        return out


def cut_certificate(path: ForestPath) -> dict | None:
    """A selector-independent good assignment from a single cut, if any."""
    m, e = path.monoid, path.e
    mul = m.mul
    verts = path.vertices
    n = len(path)
    if n < 2:
        return None
    first_end = len(path.components[0])
    last_start = len(verts) - len(path.components[-1])
    for cut in range(first_end, last_start + 1):
        ok = True
        for x in verts[:cut]:
            for y in verts[cut:]:
                i, p = x
                j, q = y
                rx, ly = path.r(x), path.l(y)
                if i == j:
                    mid = path.infix(i, p, q)
                elif j == i + 1:
                    mid = mul(rx, ly)
                else:
                    continue
                if mid != mul(mul(rx, e), ly):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return {v: (LEFT if k < cut else RIGHT) for k, v in enumerate(verts)}
    return None
