"""MSO interpretations over words and their compilation to (monoid, selector)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Sequence

import numpy as np

from . import automata as fa
from .graphs import LabelledGraph
from .mlgraph import EdgeSelector, WordGraph
from .monoid import FiniteMonoid, MonoidMorphism
from .mso import (
    TRUE,
    And,
    Compiler,
    Const,
    Formula,
    MsoError,
    Rel,
    check_formula,
    encode,
    holds,
    parse_formula,
    render,
    substitute,
)


class NotSimplified(ValueError):
    pass


@dataclass(eq=False)
class Interpretation:
    alphabet: tuple
    edge: Formula
    dom: Formula = TRUE
    delta: Formula = TRUE
    morphism: MonoidMorphism | None = None
    name: str = ""

    def __post_init__(self):
        self.alphabet = tuple(self.alphabet)
        if not self.alphabet:
            raise MsoError("alphabet must be nonempty")
        if isinstance(self.edge, str):
            self.edge = parse_formula(self.edge)
        if isinstance(self.dom, str):
            self.dom = parse_formula(self.dom)
        if isinstance(self.delta, str):
            self.delta = parse_formula(self.delta)
        check_formula(self.edge, self.alphabet, ["x", "y"], self.morphism)
        check_formula(self.dom, self.alphabet, ["x"], self.morphism)
        check_formula(self.delta, self.alphabet, [], self.morphism)

    @property
    def is_simplified(self) -> bool:
        return self.dom == TRUE and self.delta == TRUE

    @cached_property
    def _compiler(self) -> Compiler:
        return Compiler(self.alphabet, self.morphism)

    @cached_property
    def edge_automaton(self) -> fa.FiniteAutomaton:
        """Marked language of the edge formula restricted to ``x < y``."""
        c = self._compiler
        return c.compile(And(self.edge, Rel("<", "x", "y")), ["x", "y"])

    @cached_property
    def dom_automaton(self) -> fa.FiniteAutomaton:
        return self._compiler.compile(self.dom, ["x"])

    @cached_property
    def delta_automaton(self) -> fa.FiniteAutomaton:
        return self._compiler.compile(self.delta, [])

    def to_json(self) -> dict:
        doc = {
            "alphabet": list(self.alphabet),
            "edge": render(self.edge),
            "dom": render(self.dom),
            "delta": render(self.delta),
        }
        if self.morphism is not None:
            doc["monoid"] = self.morphism.target.to_json()
            doc["morphism"] = self.morphism.to_json()
        return doc


def simplify_interpretation(interp: Interpretation) -> Interpretation:
    """Fold the domain and sentence formulas into the edge formula.

    Positions outside the domain, and every position of a word rejected by
    the sentence, become isolated vertices.
    """
    if interp.is_simplified:
        return interp
    dom_x = interp.dom
    dom_y = substitute(interp.dom, {"x": "y"})
    parts = [interp.edge]
    for f in (dom_x, dom_y, interp.delta):
        if f != TRUE:
            parts.append(f)
    edge = parts[0]
    for f in parts[1:]:
        edge = And(edge, f)
    if any(f == Const(False) for f in parts):
        edge = Const(False)
    return Interpretation(interp.alphabet, edge, TRUE, TRUE, interp.morphism, interp.name)


def eval_interpretation(interp: Interpretation, word: Sequence[Hashable], method: str = "automaton") -> LabelledGraph:
    """The graph of ``word``: vertices are 1-based positions in the domain."""
    word = tuple(word)
    for s in word:
        if s not in interp.alphabet:
            raise MsoError(f"letter {s!r} is not in the alphabet")
    n = len(word)
    if method == "oracle":
        mu = interp.morphism
        if not holds(interp.delta, word, {}, mu):
            return LabelledGraph.build([], [])
        verts = [i for i in range(n) if holds(interp.dom, word, {"x": i}, mu)]
        edges = [
            (i + 1, j + 1)
            for i, j in itertools.combinations(verts, 2)
            if holds(interp.edge, word, {"x": i, "y": j}, mu)
        ]
        return LabelledGraph.build([v + 1 for v in verts], edges)
    if method != "automaton":
        raise ValueError("method is 'automaton' or 'oracle'")
    if not interp.delta_automaton.accepts(encode(word, [], {})):
        return LabelledGraph.build([], [])
    dom = interp.dom_automaton
    verts = [i for i in range(n) if dom.accepts(encode(word, ["x"], {"x": i}))]
    ea = interp.edge_automaton
    edges = [
        (i + 1, j + 1)
        for i, j in itertools.combinations(verts, 2)
        if ea.accepts(encode(word, ["x", "y"], {"x": i, "y": j}))
    ]
    return LabelledGraph.build([v + 1 for v in verts], edges)


@dataclass(eq=False)
class CompiledInterpretation:
    monoid: FiniteMonoid
    morphism: MonoidMorphism
    pedge: EdgeSelector
    source: Interpretation | None = field(default=None, repr=False)

    @property
    def letters(self) -> tuple[int, ...]:
        """Distinct letter images, in id order."""
        return tuple(sorted(set(self.morphism.images.values())))

    def word_graph(self, word: Sequence[Hashable]) -> WordGraph:
        return WordGraph(self.monoid, self.pedge, self.morphism.letters(word))

    def to_json(self) -> dict:
        return {
            "monoid": self.monoid.to_json(),
            "morphism": self.morphism.to_json(),
            "pedge": self.pedge.to_json(),
        }

    @classmethod
    def direct(cls, monoid: FiniteMonoid, pedge: EdgeSelector, letters: Sequence | None = None) -> "CompiledInterpretation":
        """Use monoid elements themselves as letters (all of them by default)."""
        els = list(monoid.names) if letters is None else [monoid.names[monoid.id_of(x)] for x in letters]
        mu = MonoidMorphism(els, monoid, {x: x for x in els})
        return cls(monoid, mu, pedge)


def interpretation_to_monoid(interp: Interpretation) -> CompiledInterpretation:
    """Monoid, letter morphism and edge selector realising the edge formula.

    Uses the marked-last-letter product over the transition monoid of the
    edge automaton, then quotients by the coarsest congruence that
    saturates the selector.
    """
    if not interp.is_simplified:
        raise NotSimplified("simplify the interpretation first (domain and sentence must be 'true')")
    A = interp.edge_automaton
    sigma = interp.alphabet
    marks = {"00": (0, 0), "10": (1, 0), "01": (0, 1)}
    T, acc = fa._complete_table(A)
    col = {sym: j for j, sym in enumerate(A.alphabet)}
    nq = T.shape[0]

    def fn(s, bits):
        return T[:, col[(s, bits)]]

    gens = []
    for s in sigma:
        gens.append(tuple(tuple(int(v) for v in fn(s, marks[k])) for k in ("00", "10", "01")))

    def then(f, g):
        return tuple(g[q] for q in f)

    def mul(a, b):
        return (then(a[0], b[0]), then(a[0], b[1]), then(a[0], b[2]))

    # nonempty part S, generated by the letter triples
    index = {}
    elems = []
    for g in gens:
        if g not in index:
            index[g] = len(elems)
            elems.append(g)
    frontier = list(elems)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = mul(a, g)
                if c not in index:
                    index[c] = len(elems)
                    elems.append(c)
                    nxt.append(c)
        frontier = nxt
    S = len(elems)
    C1 = np.array([e[0] for e in elems] + [tuple(range(nq))], dtype=np.int64)  # last row: empty suffix
    C2 = np.array([e[1] for e in elems], dtype=np.int64)
    C3 = np.array([e[2] for e in elems], dtype=np.int64)
    q0 = A.start
    after_pre = C2[:, q0]  # (p,)
    after_mid = C3[:, after_pre].T  # (p, m)
    final = C1[:, after_mid]  # (s, p, m)
    P = acc[final].transpose(1, 2, 0)  # (p, m, s) with s in S + [empty]
    right = np.array([[index[mul(a, g)] for g in gens] for a in elems], dtype=np.int64).reshape(S, len(gens))
    left = np.array([[index[mul(g, a)] for g in gens] for a in elems], dtype=np.int64).reshape(S, len(gens))

    # coarsest congruence on S saturating P
    sig = [
        (P[x].tobytes(), P[:, x, :].tobytes(), P[:, :, x].tobytes())
        for x in range(S)
    ]
    cls = _classes(sig)
    while True:
        sig2 = [(cls[x],) + tuple(cls[right[x]]) + tuple(cls[left[x]]) for x in range(S)]
        new = _classes(sig2)
        if new.max() == cls.max():
            cls = new
            break
        cls = new
    k = int(cls.max()) + 1
    rep = [int(np.flatnonzero(cls == c)[0]) for c in range(k)]
    qmul = [[int(cls[index[mul(elems[rep[a]], elems[rep[b]])]]) for b in range(k)] for a in range(k)]
    gen_cls = [int(cls[index[g]]) for g in gens]
    # merge the adjoined identity with a neutral class when the selector allows it
    neutral = None
    for c in range(k):
        if all(qmul[c][d] == d and qmul[d][c] == d for d in range(k)):
            if np.array_equal(P[:, :, S], P[:, :, rep[c]]):
                neutral = c
            break
    if neutral is None:
        size = k + 1
        one = k
        table = [row + [a] for a, row in enumerate(qmul)] + [list(range(k)) + [one]]
    else:
        size = k
        one = neutral
        table = qmul
    cube = np.zeros((size, size, size), dtype=bool)
    for a in range(k):
        for b in range(k):
            for c in range(k):
                cube[a, b, c] = P[rep[a], rep[b], rep[c]]
            if neutral is None:
                cube[a, b, one] = P[rep[a], rep[b], S]
    # renumber in BFS order from the identity so ids are canonical
    order = [one]
    seen = {one}
    for x in order:
        for g in gen_cls:
            y = table[x][g]
            if y not in seen:
                seen.add(y)
                order.append(y)
    pos = {x: i for i, x in enumerate(order)}
    table = [[pos[table[x][y]] for y in order] for x in order]
    cube = cube[np.ix_(order, order, order)]
    gen_cls = [pos[g] for g in gen_cls]
    one = 0
    names = _short_names(table, one, gen_cls, sigma)
    monoid = FiniteMonoid(table, one, names)
    mu = MonoidMorphism(sigma, monoid, {s: gen_cls[i] for i, s in enumerate(sigma)})
    pedge = EdgeSelector(monoid, cube=cube)
    return CompiledInterpretation(monoid, mu, pedge, source=interp)


def _classes(sig) -> np.ndarray:
    ids: dict = {}
    return np.array([ids.setdefault(s, len(ids)) for s in sig], dtype=np.int64)


def _short_names(table, one, gens, sigma) -> list[str]:
    """Name each element by a shortest word reaching it (BFS, alphabet order)."""
    sep = "" if all(len(str(s)) == 1 for s in sigma) else "."
    names: dict[int, str] = {one: "1"}
    frontier = [(one, "")]
    while frontier:
        nxt = []
        for x, w in frontier:
            for g, s in zip(gens, sigma):
                y = table[x][g]
                if y not in names:
                    word = f"{w}{sep}{s}" if w else str(s)
                    names[y] = word
                    nxt.append((y, word))
        frontier = nxt
    return [names[i] for i in range(len(table))]


def load_interpretation(doc: dict, name: str = "") -> Interpretation:
    from .monoid import monoid_from_json

    mu = None
    if "morphism" in doc:
        m = monoid_from_json(doc["monoid"])
        mu = MonoidMorphism(doc["alphabet"], m, doc["morphism"])
    return Interpretation(
        tuple(doc["alphabet"]),
        parse_formula(doc["edge"]),
        parse_formula(doc.get("dom", "true")),
        parse_formula(doc.get("delta", "true")),
        mu,
        name or doc.get("name", ""),
    )


def compile_interpretation(interp: Interpretation) -> CompiledInterpretation:
    return interpretation_to_monoid(simplify_interpretation(interp))
