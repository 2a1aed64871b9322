"""Vertex-labelled simple graphs, label quasi-orders and embeddings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np


class LabelOrder:
    """A quasi-order on labels.

    ``LabelOrder.equality()`` compares arbitrary hashable labels by
    equality.  Otherwise ``labels`` is a finite list and ``matrix[i][j]``
    says ``labels[i] <= labels[j]``.
    """

    def __init__(self, labels: Sequence[Hashable] | None = None, matrix=None):
        if labels is None:
            self.labels = None
            self.matrix = None
            return
        self.labels = tuple(labels)
        self._index = {a: i for i, a in enumerate(self.labels)}
        n = len(self.labels)
        m = np.eye(n, dtype=bool) if matrix is None else np.array(matrix, dtype=bool)
        if m.shape != (n, n):
            raise ValueError("order matrix must be |labels| x |labels|")
        if not m.diagonal().all():
            raise ValueError("label order must be reflexive")
        mi = m.astype(np.int64)
        if ((mi @ mi > 0) & ~m).any():
            raise ValueError("label order must be transitive")
        self.matrix = m

    @classmethod
    def equality(cls, labels: Sequence[Hashable] | None = None) -> "LabelOrder":
        return cls(labels)

    @classmethod
    def chain(cls, labels: Sequence[Hashable]) -> "LabelOrder":
        n = len(labels)
        return cls(labels, [[i <= j for j in range(n)] for i in range(n)])

    def leq(self, a: Hashable, b: Hashable) -> bool:
        if self.matrix is None:
            return a == b
        return bool(self.matrix[self._index[a], self._index[b]])


@dataclass
class LabelledGraph:
    """Simple undirected graph with a label on every vertex."""

    vertices: tuple
    edges: frozenset
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = tuple(self.vertices)
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertices")
        es = set()
        for e in self.edges:
            e = frozenset(e)
            if len(e) != 2:
                raise ValueError(f"self-loops are not allowed: {set(e)}")
            if not e <= vs:
                raise ValueError(f"edge {set(e)} uses an unknown vertex")
            es.add(e)
        self.edges = frozenset(es)
        labels = {v: None for v in self.vertices}
        labels.update(self.labels or {})
        self.labels = labels

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable[tuple], labels: dict | None = None) -> "LabelledGraph":
        return cls(tuple(vertices), frozenset(frozenset(e) for e in edges), dict(labels or {}))

    def __len__(self):
        return len(self.vertices)

    def has_edge(self, u, v) -> bool:
        return frozenset((u, v)) in self.edges

    def neighbours(self, u) -> set:
        return {w for e in self.edges if u in e for w in e if w != u}

    def degree(self, u) -> int:
        return sum(1 for e in self.edges if u in e)

    def relabel(self, labels: dict) -> "LabelledGraph":
        return LabelledGraph(self.vertices, self.edges, dict(labels))

    def sorted_edges(self) -> list[tuple]:
        pos = {v: i for i, v in enumerate(self.vertices)}
        return sorted((tuple(sorted(e, key=pos.__getitem__)) for e in self.edges), key=lambda p: (pos[p[0]], pos[p[1]]))

    def same_as(self, other: "LabelledGraph", labels: bool = True) -> bool:
        if self.vertices != other.vertices or self.edges != other.edges:
            return False
        return not labels or self.labels == other.labels

    def to_json(self, label_fmt=None) -> dict:
        fmt = label_fmt or (lambda x: x)
        return {
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.sorted_edges()],
            "labels": {str(v): fmt(self.labels[v]) for v in self.vertices},
        }

    def to_dot(self, name: str = "G", label_fmt=None) -> str:
        fmt = label_fmt or (lambda x: "" if x is None else str(x))
        lines = [f"graph {name} {{"]
        for v in self.vertices:
            lab = fmt(self.labels[v])
            text = f"{v}" if not lab else f"{v}: {lab}"
            lines.append(f'  "{v}" [label="{_dot_escape(text)}"];')
        for u, v in self.sorted_edges():
            lines.append(f'  "{u}" -- "{v}";')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        for v in self.vertices:
            g.add_node(v, label=self.labels[v])
        g.add_edges_from(tuple(e) for e in self.edges)
        return g


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def labelled_embedding(
    g: LabelledGraph,
    h: LabelledGraph,
    order: LabelOrder | None = None,
    direction: str = "down",
) -> dict | None:
    """An induced-subgraph embedding of ``g`` into ``h`` respecting labels.

    With ``direction="down"`` a vertex ``u`` may map to ``v`` when
    ``label(v) <= label(u)``; ``direction="usual"`` flips this.  Equality
    orders make the two coincide.
    """
    order = order or LabelOrder.equality()
    if direction not in ("down", "usual"):
        raise ValueError("direction is 'down' or 'usual'")
    if len(g) > len(h) or len(g.edges) > len(h.edges):
        return None
    gv, hv = list(g.vertices), list(h.vertices)
    hidx = {v: i for i, v in enumerate(hv)}
    hadj = [0] * len(hv)
    for e in h.edges:
        a, b = (hidx[x] for x in e)
        hadj[a] |= 1 << b
        hadj[b] |= 1 << a
    hdeg = [bin(x).count("1") for x in hadj]
    gadj = {v: g.neighbours(v) for v in gv}

    def compatible(u, v):
        lu, lv = g.labels[u], h.labels[v]
        return order.leq(lv, lu) if direction == "down" else order.leq(lu, lv)

    cand0 = {}
    for u in gv:
        mask = 0
        for j, v in enumerate(hv):
            if hdeg[j] >= len(gadj[u]) and compatible(u, v):
                mask |= 1 << j
        if not mask:
            return None
        cand0[u] = mask
    # most constrained first, then keep neighbours close together
    todo = sorted(gv, key=lambda u: (bin(cand0[u]).count("1"), -len(gadj[u])))
    seq = []
    placed = set()
    while todo:
        nxt = max(todo, key=lambda u: (len(gadj[u] & placed), -bin(cand0[u]).count("1"), -len(gadj[u])))
        todo.remove(nxt)
        seq.append(nxt)
        placed.add(nxt)
    full = (1 << len(hv)) - 1
    image: dict = {}

    def search(k, used):
        if k == len(seq):
            return True
        u = seq[k]
        cand = cand0[u] & ~used
        for w, j in image.items():
            if w in gadj[u]:
                cand &= hadj[j]
            else:
                cand &= full & ~hadj[j]
            if not cand:
                return False
        while cand:
            low = cand & -cand
            j = low.bit_length() - 1
            image[u] = j
            if search(k + 1, used | low):
                return True
            del image[u]
            cand ^= low
        return False

    if search(0, 0):
        return {u: hv[j] for u, j in image.items()}
    return None


def is_embedding(g: LabelledGraph, h: LabelledGraph, f: dict, order: LabelOrder | None = None, direction="down") -> bool:
    order = order or LabelOrder.equality()
    if set(f) != set(g.vertices) or len(set(f.values())) != len(f):
        return False
    for u in g.vertices:
        lu, lv = g.labels[u], h.labels[f[u]]
        if not (order.leq(lv, lu) if direction == "down" else order.leq(lu, lv)):
            return False
    vs = list(g.vertices)
    for i, u in enumerate(vs):
        for w in vs[i + 1 :]:
            if g.has_edge(u, w) != h.has_edge(f[u], f[w]):
                return False
    return True


def subword_embedding(u: Sequence, v: Sequence, order: LabelOrder | None = None) -> bool:
    """Higman's ordering: ``u`` is a subsequence of ``v`` with ``u_i <= v_h(i)``."""
    order = order or LabelOrder.equality()
    j = 0
    for a in u:
        while j < len(v) and not order.leq(a, v[j]):
            j += 1
        if j == len(v):
            return False
        j += 1
    return True


def path_graph(n: int, labels: dict | None = None) -> LabelledGraph:
    return LabelledGraph.build(range(1, n + 1), [(i, i + 1) for i in range(1, n)], labels)


def complete_graph(n: int, labels: dict | None = None) -> LabelledGraph:
    return LabelledGraph.build(
        range(1, n + 1), [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)], labels
    )


def cycle_graph(n: int, labels: dict | None = None) -> LabelledGraph:
    return LabelledGraph.build(range(1, n + 1), [(i, i % n + 1) for i in range(1, n + 1)], labels)
