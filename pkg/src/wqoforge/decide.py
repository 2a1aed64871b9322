"""The labelled-WQO decision and the antichain constructions behind it."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import networkx as nx

from . import automata as fa
from .badness import BadnessAutomaton, badness_automaton, is_bracket
from .forestpath import CLOSE, OPEN, ForestPath, is_good_forest_path
from .graphs import LabelledGraph, LabelOrder, labelled_embedding
from .interpretation import CompiledInterpretation, Interpretation, compile_interpretation
from .mlgraph import EdgeSelector, WordGraph, downcast
from .monoid import FiniteMonoid, is_totally_ordered


class ContextMismatch(ValueError):
    pass


class WitnessInvalid(ValueError):
    pass


class NotBad(ValueError):
    pass


class VerdictMismatch(AssertionError):
    pass


# --- bracket-alphabet rendering ----------------------------------------------------


def render_symbol(m: FiniteMonoid, sym) -> str:
    if is_bracket(sym):
        return sym[0] + m.names[sym[1]]
    return m.names[sym]


def render_word(m: FiniteMonoid, word: Iterable) -> str:
    return " ".join(render_symbol(m, s) for s in word)


def parse_word(m: FiniteMonoid, text: str) -> tuple:
    out = []
    for tok in text.split():
        if tok[0] in (OPEN, CLOSE) and len(tok) > 1:
            out.append((tok[0], m.id_of(tok[1:])))
        else:
            out.append(m.id_of(tok))
    return tuple(out)


# --- bounded / unbounded ----------------------------------------------------------------


@dataclass(frozen=True)
class Bounded:
    bound: int
    kind: str = "Bounded"


@dataclass(frozen=True)
class Unbounded:
    context: tuple[int, int]
    idempotent: int
    pump: fa.Infinite
    kind: str = "Unbounded"

    def member(self, k: int) -> tuple:
        return self.pump.member(k)

    def path(self, m: FiniteMonoid, pedge: EdgeSelector, k: int) -> ForestPath:
        return ForestPath.decode(m, pedge, self.member(k))

    def components(self, k: int) -> int:
        return sum(1 for s in self.member(k) if is_bracket(s) and s[0] == OPEN)


def _bracket_skeleton(a: fa.FiniteAutomaton) -> fa.FiniteAutomaton:
    return fa.minimize(fa.determinize(fa.project(a, lambda s: s if is_bracket(s) else fa.ERASE)))


def decide_bounded_bad_paths(
    m: FiniteMonoid,
    pedge: EdgeSelector,
    letters: Sequence | None = None,
    cap: int | None = 200_000,
    badness: BadnessAutomaton | None = None,
) -> Bounded | Unbounded:
    """Bounded(N) with N the largest number of blocks of a bad path, or a
    pump from the first context (idempotent, then a, then b) whose bad
    language has unboundedly many blocks."""
    bad = badness or badness_automaton(m, pedge, letters, cap)
    cls = fa.classify_language(_bracket_skeleton(bad.automaton))
    if isinstance(cls, fa.Empty):
        return Bounded(0)
    if isinstance(cls, fa.Finite):
        return Bounded(cls.max_length // 2)
    for (e, a, b), d in sorted(bad.per_context.items()):
        if isinstance(fa.classify_language(_bracket_skeleton(d)), fa.Infinite):
            pump = fa.find_pump(fa.trim(d), through=is_bracket)
            return Unbounded((a, b), e, pump)
    raise AssertionError("union is unbounded but no context is")  # pragma: no cover


# --- verdicts -------------------------------------------------------------------------------


@dataclass
class LabelledWQO:
    bound: int
    method: str
    monoid_size: int
    kind: str = "LabelledWQO"

    def to_json(self) -> dict:
        return {"verdict": self.kind, "bad_path_bound": self.bound, "method": self.method, "monoid_size": self.monoid_size}


@dataclass
class NotWQO:
    k: int
    k_main_proof: int
    witness: Unbounded
    monoid: FiniteMonoid = field(repr=False)
    pedge: EdgeSelector = field(repr=False)
    kind: str = "NotWQO"

    def family(self, count: int = 5) -> list[ForestPath]:
        return [self.witness.path(self.monoid, self.pedge, k) for k in range(1, count + 1)]

    def to_json(self, members: int = 5) -> dict:
        m = self.monoid
        w = self.witness
        a, b = w.context
        return {
            "verdict": self.kind,
            "labels_k": self.k,
            "labels_k_main_proof": self.k_main_proof,
            "monoid_size": m.size,
            "context": [m.names[a], m.names[b]],
            "idempotent": m.names[w.idempotent],
            "pump": {
                "u": render_word(m, w.pump.u),
                "v": render_word(m, w.pump.v),
                "w": render_word(m, w.pump.w),
            },
            "witness_encodings": [render_word(m, w.member(k)) for k in range(1, members + 1)],
        }


Verdict = LabelledWQO | NotWQO


def _as_compiled(src) -> CompiledInterpretation:
    if isinstance(src, CompiledInterpretation):
        return src
    if isinstance(src, Interpretation):
        return compile_interpretation(src)
    raise TypeError("expected an Interpretation or a CompiledInterpretation")


def decide_wqo(src, cap: int | None = 200_000, fast_path: bool = True, cross_check: bool = False) -> Verdict:
    """Labelled-WQO verdict for the image class of ``src``.

    Totally ordered monoids are accepted without building automata (their
    bad paths have at most two blocks); ``cross_check`` runs the automaton
    anyway and raises :class:`VerdictMismatch` on disagreement.
    """
    ci = _as_compiled(src)
    m, pedge, letters = ci.monoid, ci.pedge, ci.letters
    if fast_path and is_totally_ordered(m):
        fast = LabelledWQO(2, "total-order", m.size)
        if cross_check:
            res = decide_bounded_bad_paths(m, pedge, letters, cap)
            if not isinstance(res, Bounded) or res.bound > 2:
                raise VerdictMismatch(f"fast path says WQO, automaton says {res}")
        return fast
    res = decide_bounded_bad_paths(m, pedge, letters, cap)
    if isinstance(res, Bounded):
        return LabelledWQO(res.bound, "automaton", m.size)
    return NotWQO(3 * m.size**2, 3 * m.size, res, m, pedge)


# --- antichains ------------------------------------------------------------------------------

START, MIDDLE, END = "start", "middle", "end"


def bad_path_graph(path: ForestPath, a: int, b: int) -> LabelledGraph:
    """Downcast at ``(a, b)`` labelled by ``((a l, r b), start|middle|end)``."""
    g = downcast(path.word_graph(), a, b)
    n = len(path)
    labels = {}
    for pos, (i, _) in enumerate(path.vertices, start=1):
        tag = START if i == 1 else END if i == n else MIDDLE
        labels[pos] = (g.labels[pos], tag)
    return g.relabel(labels)


def antichain_from_bad_paths(paths: Iterable[ForestPath], context: tuple[int, int], check: bool = True) -> Iterator[LabelledGraph]:
    """Graphs of a bad-path family; pairwise incomparable when every path
    has more blocks than the previous graph has vertices."""
    a, b = context
    prev = None
    for p in paths:
        if check:
            if is_good_forest_path(p, a, b).good:
                raise ContextMismatch(f"{p!r} is good in context {context}")
            if prev is not None and len(p) <= prev:
                raise ValueError("each path needs more blocks than the previous graph has vertices")
        prev = p.n_vertices()
        yield bad_path_graph(p, a, b)


def spaced_family(witness: Unbounded, m: FiniteMonoid, pedge: EdgeSelector, count: int) -> list[ForestPath]:
    """Members of a pump family, each with more blocks than the previous
    member has vertices."""
    out: list[ForestPath] = []
    k = 1
    while len(out) < count:
        p = witness.path(m, pedge, k)
        if not out or len(p) > out[-1].n_vertices():
            out.append(p)
        k += 1
    return out


def pairwise_incomparable(graphs: Sequence[LabelledGraph], order: LabelOrder | None = None) -> bool:
    for i, j in itertools.permutations(range(len(graphs)), 2):
        if labelled_embedding(graphs[i], graphs[j], order) is not None:
            return False
    return True


def _selector_middle(m: FiniteMonoid, mids) -> EdgeSelector:
    return EdgeSelector.middle_in(m, [m.names[x] for x in mids])


def totally_ordered_antichain(m: FiniteMonoid, a, b, endpoints: bool = True) -> Iterator[LabelledGraph]:
    """Graphs ``G_0 = A B`` and ``G_{n+1} = G_0 G_n`` under the selector
    ``{(x, y, z) : y in {a, b}}``, downcast at ``(1, 1)``.

    With ``endpoints`` the first and last vertices get label 1 and the
    rest label 0; otherwise all labels are 0.
    """
    a, b = m.id_of(a), m.id_of(b)
    J = m.two_sided_ideals
    ab = m.mul(a, b)
    if J[ab] == J[a] or J[ab] == J[b]:
        raise WitnessInvalid(f"J({m.names[ab]}) equals J({m.names[a]}) or J({m.names[b]})")
    pedge = _selector_middle(m, {a, b})
    n = 0
    while True:
        word = [a, b] * (n + 1)
        g = downcast(WordGraph(m, pedge, word))
        k = len(word)
        labels = {v: int(endpoints and v in (1, k)) for v in g.vertices}
        yield g.relabel(labels)
        n += 1


def find_split(m: FiniteMonoid, word: Sequence) -> tuple[tuple, int, tuple]:
    """``word = U a V`` with ``a`` the leftmost J-minimal letter; requires a
    totally ordered monoid, an idempotent value and ``a`` J-equivalent to it."""
    w = tuple(m.id_of(x) for x in word)
    if not w:
        raise ValueError("empty word")
    e = m.product(w)
    if not m.is_idempotent(e):
        raise ValueError(f"{m.names[e]} is not idempotent")
    if not is_totally_ordered(m):
        raise ValueError("monoid is not totally ordered")
    pos = 0
    for i, x in enumerate(w):
        if m.j_leq(x, w[pos]) and not m.j_leq(w[pos], x):
            pos = i
    if not m.j_equiv(w[pos], e):
        raise ValueError("no letter is J-equivalent to the value")  # cannot happen when totally ordered
    return w[:pos], w[pos], w[pos + 1 :]


# --- empirical antichain search -------------------------------------------------------------------


def _labelling(g: LabelledGraph, strategy: str, label_count: int, rng: random.Random) -> dict:
    if strategy == "uniform":
        return {v: 0 for v in g.vertices}
    if strategy == "endpoints":
        return {v: int(label_count > 1 and g.degree(v) <= 1) for v in g.vertices}
    if strategy == "random":
        return {v: rng.randrange(label_count) for v in g.vertices}
    raise ValueError(f"unknown strategy {strategy!r}")


def search_antichain(
    graphs: Iterable[LabelledGraph],
    label_count: int,
    size_cap: int,
    strategies: Sequence[str] = ("uniform", "endpoints"),
    seed: int = 0,
    min_size: int = 3,
) -> list[LabelledGraph] | None:
    """Largest set of pairwise incomparable graphs among the first
    ``size_cap`` stream members, under a few labelling strategies.

    This is an experiment, not a decision procedure: ``None`` only means
    nothing of size ``min_size`` turned up.
    """
    pool = list(itertools.islice(graphs, size_cap))
    if not pool:
        return None
    rng = random.Random(seed)
    best: list = []
    for strat in strategies:
        labelled = [g.relabel(_labelling(g, strat, label_count, rng)) for g in pool]
        inc = nx.Graph()
        inc.add_nodes_from(range(len(labelled)))
        for i, j in itertools.combinations(range(len(labelled)), 2):
            gi, gj = labelled[i], labelled[j]
            if labelled_embedding(gi, gj) is None and labelled_embedding(gj, gi) is None:
                inc.add_edge(i, j)
        clique, _ = nx.max_weight_clique(inc, weight=None)
        if len(clique) > len(best):
            best = [labelled[i] for i in sorted(clique)]
    return best if len(best) >= min_size else None
