"""Tree models, gap embeddings and the layered order reflection.

Trees are parent arrays over ``0..n-1`` with exactly one ``None`` (the
root).  Embeddings are rooted: the root goes to the root, leaves go to
leaves, ancestors go to strict ancestors, and the children of a vertex go
into pairwise different child subtrees of its image, which is exactly
preservation of least common ancestors.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import networkx as nx

from .graphs import LabelledGraph, LabelOrder
from .monoid import FiniteMonoid, is_totally_ordered

BRUTE_FORCE_CAP = 12


class TreeError(ValueError):
    pass


class MuMissingAtLca(TreeError):
    pass


class NotTotallyOrdered(TreeError):
    pass


class TreeTooLarge(TreeError):
    pass


class _Tree:
    """Shared rooted-tree plumbing."""

    parents: tuple

    def _init_tree(self, parents):
        self.parents = tuple(None if p is None or p == -1 else int(p) for p in parents)
        roots = [v for v, p in enumerate(self.parents) if p is None]
        if len(roots) != 1:
            raise TreeError(f"expected one root, found {len(roots)}")
        self.root = roots[0]
        n = len(self.parents)
        self.children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(self.parents):
            if p is not None:
                if not 0 <= p < n:
                    raise TreeError(f"parent {p} out of range")
                self.children[p].append(v)
        # depth by walking down from the root; also catches cycles
        self.depth = [-1] * n
        self.depth[self.root] = 0
        stack = [self.root]
        seen = 1
        while stack:
            v = stack.pop()
            for c in self.children[v]:
                self.depth[c] = self.depth[v] + 1
                stack.append(c)
                seen += 1
        if seen != n:
            raise TreeError("parent array has a cycle")

    @property
    def n(self) -> int:
        return len(self.parents)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if not self.children[v])

    def path_up(self, v: int, anc: int) -> list[int]:
        """Vertices ``v, parent(v), ...`` strictly below ``anc``; ``[]`` if ``v == anc``."""
        out = []
        while v != anc:
            if v is None:
                raise TreeError("not an ancestor")
            out.append(v)
            v = self.parents[v]
        return out

    def is_ancestor(self, a: int, v: int) -> bool:
        while v is not None:
            if v == a:
                return True
            v = self.parents[v]
        return False

    def lca(self, x: int, y: int) -> int:
        while self.depth[x] > self.depth[y]:
            x = self.parents[x]
        while self.depth[y] > self.depth[x]:
            y = self.parents[y]
        while x != y:
            x, y = self.parents[x], self.parents[y]
        return x

    @cached_property
    def descendants(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for v in range(self.n):
            u = self.parents[v]
            while u is not None:
                out[u].append(v)
                u = self.parents[u]
        return out

    def child_subtree(self, anc: int, v: int) -> int:
        """The child of ``anc`` whose subtree contains the descendant ``v``."""
        while self.parents[v] != anc:
            v = self.parents[v]
        return v


# --- tree models ---------------------------------------------------------------------------


class TreeModel(_Tree):
    def __init__(self, monoid: FiniteMonoid, parents: Sequence, mu: dict, lam: dict):
        self.monoid = monoid
        self._init_tree(parents)
        self.mu = {int(v): frozenset((monoid.id_of(p), monoid.id_of(q)) for p, q in pairs) for v, pairs in mu.items()}
        self.lam = {int(v): monoid.id_of(x) for v, x in lam.items()}
        for v, p in enumerate(self.parents):
            if p is not None and v not in self.lam:
                raise TreeError(f"edge above vertex {v} has no label")

    def path_product(self, v: int, anc: int) -> int:
        """Product of edge labels from ``anc`` down to ``v`` (root-to-leaf order)."""
        m = self.monoid
        out = m.identity
        for u in self.path_up(v, anc):
            out = m.mul(self.lam[u], out)
        return out

    def root_word(self, v: int) -> list[int]:
        return [self.lam[u] for u in reversed(self.path_up(v, self.root))]

    def to_json(self) -> dict:
        nm = self.monoid.names
        return {
            "monoid": self.monoid.to_json(),
            "parents": [-1 if p is None else p for p in self.parents],
            "mu": {str(v): sorted([nm[p], nm[q]] for p, q in pairs) for v, pairs in sorted(self.mu.items())},
            "lambda": {str(v): nm[x] for v, x in sorted(self.lam.items())},
        }

    @classmethod
    def from_json(cls, doc: dict, monoid: FiniteMonoid | None = None) -> "TreeModel":
        from .monoid import monoid_from_json

        m = monoid or monoid_from_json(doc["monoid"])
        return cls(m, doc["parents"], doc.get("mu", {}), doc.get("lambda", {}))


def tmeval(t: TreeModel) -> LabelledGraph:
    """Graph on the leaves: ``{x, y}`` is an edge when ``(m_x, m_y)`` (or the
    swapped pair) lies in ``mu`` of their lowest common ancestor."""
    edges = []
    for x, y in itertools.combinations(t.leaves, 2):
        l = t.lca(x, y)
        if l not in t.mu:
            raise MuMissingAtLca(f"mu is undefined at vertex {l}, the lca of leaves {x} and {y}")
        mx, my = t.path_product(x, l), t.path_product(y, l)
        sel = t.mu[l]
        if (mx, my) in sel or (my, mx) in sel:
            edges.append((x, y))
    return LabelledGraph.build(t.leaves, edges, {v: 0 for v in t.leaves})


# --- the generic rooted embedding search ---------------------------------------------------


def _rooted_embedding(
    s: _Tree,
    t: _Tree,
    vertex_ok: Callable[[int, int], bool],
    edge_ok: Callable[[int, int, list[int]], bool],
) -> dict | None:
    """Shared search.  ``edge_ok(c, v, path)`` gets the child ``c`` of ``s``,
    its candidate image ``v`` and the image path (vertices of ``t`` from
    ``v`` up to, excluding, the parent's image)."""
    memo: dict = {}

    def fits(x: int, v: int) -> dict | None:
        key = (x, v)
        if key in memo:
            return memo[key]
        memo[key] = None
        if not vertex_ok(x, v) or (not s.children[x]) != (not t.children[v]):
            return None
        kids = s.children[x]
        if len(kids) > len(t.children[v]):
            return None
        options: dict[int, dict[int, dict]] = {}
        for c in kids:
            options[c] = {}
            for w in t.descendants[v]:
                path = t.path_up(w, v)
                if not edge_ok(c, w, path):
                    continue
                sub = fits(c, w)
                if sub is None:
                    continue
                branch = path[-1]
                if branch not in options[c]:
                    options[c][branch] = sub
            if not options[c]:
                return None
        g = nx.Graph()
        left = [("s", c) for c in kids]
        g.add_nodes_from(left)
        for c in kids:
            for br in options[c]:
                g.add_edge(("s", c), ("t", br))
        match = nx.bipartite.hopcroft_karp_matching(g, top_nodes=left)
        if any(("s", c) not in match for c in kids):
            return None
        out = {x: v}
        for c in kids:
            out.update(options[c][match[("s", c)][1]])
        memo[key] = out
        return out

    return fits(s.root, t.root)


def _brute_rooted(s: _Tree, t: _Tree, vertex_ok, edge_ok) -> dict | None:
    if max(s.n, t.n) > BRUTE_FORCE_CAP:
        raise TreeTooLarge(f"brute force is capped at {BRUTE_FORCE_CAP} vertices")
    order = sorted(range(s.n), key=lambda v: s.depth[v])
    h: dict = {}
    used: set = set()

    def ok(x, v) -> bool:
        if not vertex_ok(x, v) or (not s.children[x]) != (not t.children[v]):
            return False
        p = s.parents[x]
        if p is None:
            return v == t.root
        hp = h[p]
        if v == hp or not t.is_ancestor(hp, v):
            return False
        if not edge_ok(x, v, t.path_up(v, hp)):
            return False
        # lca preservation against every placed vertex
        for y, w in h.items():
            if t.lca(v, w) != h[s.lca(x, y)]:
                return False
        return True

    def go(k):
        if k == len(order):
            return True
        x = order[k]
        for v in range(t.n):
            if v in used or not ok(x, v):
                continue
            h[x] = v
            used.add(v)
            if go(k + 1):
                return True
            del h[x]
            used.discard(v)
        return False

    return dict(h) if go(0) else None


def check_rooted_map(s: _Tree, t: _Tree, h: dict, vertex_ok, edge_ok) -> bool:
    if set(h) != set(range(s.n)) or len(set(h.values())) != s.n or h[s.root] != t.root:
        return False
    for x in range(s.n):
        if not vertex_ok(x, h[x]) or (not s.children[x]) != (not t.children[h[x]]):
            return False
        p = s.parents[x]
        if p is not None:
            if h[x] == h[p] or not t.is_ancestor(h[p], h[x]) or not edge_ok(x, h[x], t.path_up(h[x], h[p])):
                return False
    return all(t.lca(h[x], h[y]) == h[s.lca(x, y)] for x, y in itertools.combinations(range(s.n), 2))


def _tm_rules(t1: TreeModel, t2: TreeModel):
    if t1.monoid is not t2.monoid and t1.monoid.table.tolist() != t2.monoid.table.tolist():
        raise TreeError("tree models over different monoids")
    m = t1.monoid

    def vertex_ok(x, v):
        return t1.mu.get(x) == t2.mu.get(v)

    def edge_ok(c, v, path):
        prod = m.identity
        for u in path:  # bottom-up, so prepend
            prod = m.mul(t2.lam[u], prod)
        return prod == t1.lam[c]

    return vertex_ok, edge_ok


def tm_embedding(t1: TreeModel, t2: TreeModel, brute_force: bool = False) -> dict | None:
    """Embedding that keeps ``mu`` and replaces each edge by a path with
    the same label product."""
    vo, eo = _tm_rules(t1, t2)
    return (_brute_rooted if brute_force else _rooted_embedding)(t1, t2, vo, eo)


def induced_leaf_map(h: dict, t1: _Tree) -> dict:
    return {x: h[x] for x in t1.leaves}


# --- gap trees --------------------------------------------------------------------------------------


@dataclass(eq=False)
class GapTree(_Tree):
    parents_in: Sequence
    vertex_labels: dict
    edge_labels: dict
    vertex_order: LabelOrder = field(default_factory=LabelOrder.equality)
    edge_order: LabelOrder | None = None  # None: labels are compared with <=

    def __post_init__(self):
        self._init_tree(self.parents_in)
        self.vertex_labels = {int(k): v for k, v in self.vertex_labels.items()}
        self.edge_labels = {int(k): v for k, v in self.edge_labels.items()}
        for v in range(self.n):
            if v not in self.vertex_labels:
                raise TreeError(f"vertex {v} has no label")
            if self.parents[v] is not None and v not in self.edge_labels:
                raise TreeError(f"edge above vertex {v} has no label")

    def edge_leq(self, a, b) -> bool:
        return a <= b if self.edge_order is None else self.edge_order.leq(a, b)

    def to_json(self) -> dict:
        return {
            "parents": [-1 if p is None else p for p in self.parents],
            "vertex_labels": {str(k): _plain(v) for k, v in sorted(self.vertex_labels.items())},
            "edge_labels": {str(k): _plain(v) for k, v in sorted(self.edge_labels.items())},
        }


def _plain(x):
    if isinstance(x, (tuple, list, frozenset, set)):
        items = [_plain(y) for y in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    return x


def gap_embedding(s: GapTree, t: GapTree, last_equal: bool = True, brute_force: bool = False) -> dict | None:
    """Image paths carry labels ``>=`` the original edge's label; with
    ``last_equal`` the deepest one must also equal it."""

    def vertex_ok(x, v):
        # default direction: the image label is below the original one
        return s.vertex_order.leq(t.vertex_labels[v], s.vertex_labels[x])

    def edge_ok(c, v, path):
        lab = s.edge_labels[c]
        if not all(s.edge_leq(lab, t.edge_labels[u]) for u in path):
            return False
        return not last_equal or t.edge_labels[path[0]] == lab

    return (_brute_rooted if brute_force else _rooted_embedding)(s, t, vertex_ok, edge_ok)


def is_gap_embedding(s: GapTree, t: GapTree, h: dict, last_equal: bool = True) -> bool:
    def vertex_ok(x, v):
        return s.vertex_order.leq(t.vertex_labels[v], s.vertex_labels[x])

    def edge_ok(c, v, path):
        lab = s.edge_labels[c]
        return all(s.edge_leq(lab, t.edge_labels[u]) for u in path) and (not last_equal or t.edge_labels[path[0]] == lab)

    return check_rooted_map(s, t, h, vertex_ok, edge_ok)


UNIT = "unit"


def dt_relabel(s: GapTree) -> GapTree:
    """Vertex labels become ``(label, label of the edge to the parent)``,
    ``UNIT`` at the root; the new vertex order is the old one times
    equality on the second component."""
    labels = {v: (s.vertex_labels[v], UNIT if s.parents[v] is None else s.edge_labels[v]) for v in range(s.n)}
    base = s.vertex_order

    class _Pair(LabelOrder):
        def __init__(self):
            super().__init__()

        def leq(self, a, b):
            return base.leq(a[0], b[0]) and a[1] == b[1]

    return GapTree(s.parents, labels, dict(s.edge_labels), _Pair(), s.edge_order)


# --- layered interpretation and mtogap ---------------------------------------------------------------


def layered(m: FiniteMonoid, word: Sequence, check: bool = True) -> tuple[int, ...]:
    """Component ``a`` multiplies the letters ``w_i`` with ``a`` J-below ``w_i``."""
    if check and not is_totally_ordered(m):
        raise NotTotallyOrdered("layered needs a totally ordered monoid")
    w = [m.id_of(x) for x in word]
    out = []
    for a in m.elements:
        acc = m.identity
        for x in w:
            if m.j_leq(a, x):
                acc = m.mul(acc, x)
        out.append(acc)
    return tuple(out)


def j_edge_order(m: FiniteMonoid) -> LabelOrder:
    return LabelOrder(list(m.elements), m.j_leq_matrix)


def mtogap(t: TreeModel) -> GapTree:
    """Same tree; vertex ``x`` gets ``(mu(x), layered(root-to-x word))`` and
    edges keep their monoid labels, compared by the J-preorder."""
    m = t.monoid
    if not is_totally_ordered(m):
        raise NotTotallyOrdered("mtogap needs a totally ordered monoid")
    labels = {v: (t.mu.get(v), layered(m, t.root_word(v), check=False)) for v in range(t.n)}
    return GapTree(t.parents, labels, dict(t.lam), LabelOrder.equality(), j_edge_order(m))


def tree_model_as_gap(t: TreeModel, order: LabelOrder | None = None) -> GapTree:
    """Gap tree with ``mu`` as vertex label and the raw edge labels."""
    return GapTree(t.parents, {v: t.mu.get(v) for v in range(t.n)}, dict(t.lam), LabelOrder.equality(), order)


# --- random generation (for the property suites and the CLI) ----------------------------------------


def random_parents(n: int, rng: random.Random) -> list:
    return [None] + [rng.randrange(v) for v in range(1, n)]


def random_tree_model(m: FiniteMonoid, n: int, rng: random.Random, mu_density: float = 0.5, edge_labels: Sequence[int] | None = None) -> TreeModel:
    parents = random_parents(n, rng)
    labels = list(m.elements if edge_labels is None else edge_labels)
    lam = {v: rng.choice(labels) for v in range(1, n)}
    has_kids = {p for p in parents if p is not None}
    pairs = list(itertools.product(m.elements, repeat=2))
    mu = {v: [p for p in pairs if rng.random() < mu_density] for v in has_kids}
    return TreeModel(m, parents, mu, lam)


def grow_tree_model(t: TreeModel, rng: random.Random, extra: int, edge_labels: Sequence[int] | None = None) -> TreeModel:
    """A bigger tree model that often contains ``t``: edges are subdivided
    and side branches added, with random labels and selectors."""
    m = t.monoid
    labels = list(m.elements if edge_labels is None else edge_labels)
    parents = list(t.parents)
    lam = dict(t.lam)
    mu = {v: set(p) for v, p in t.mu.items()}
    pairs = list(itertools.product(m.elements, repeat=2))
    for _ in range(extra):
        v = len(parents)
        if rng.random() < 0.5 and len(parents) > 1:
            c = rng.randrange(1, len(parents))
            p = parents[c]
            parents.append(p)
            parents[c] = v
            lam[v] = rng.choice(labels)
            mu[v] = {q for q in pairs if rng.random() < 0.5}
        else:
            p = rng.randrange(len(parents))
            if not any(q == p for q in parents) and p != 0:
                continue  # keep leaves as leaves
            parents.append(p)
            lam[v] = rng.choice(labels)
    has_kids = {p for p in parents if p is not None}
    mu = {v: s for v, s in mu.items() if v in has_kids}
    for v in has_kids:
        mu.setdefault(v, set())
    return TreeModel(m, parents, mu, lam)
