"""Finite automata over arbitrary hashable symbols.

States are ``0..n-1``.  Transitions are stored per state as
``symbol -> tuple of successors``; a deterministic automaton simply has at
most one successor everywhere and one initial state.  Deterministic
automata are allowed to be partial: a missing transition goes to an
implicit rejecting sink, which is materialised only where needed
(complementation, minimisation, transition monoids).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

import networkx as nx
import numpy as np

from .monoid import FiniteMonoid, MonoidMorphism, transformation_name


class AutomatonError(ValueError):
    pass


class AlphabetMismatch(AutomatonError):
    pass


class NotDeterministic(AutomatonError):
    pass


class LanguageTooLarge(AutomatonError):
    pass


class ResourceCapExceeded(RuntimeError):
    def __init__(self, what: str, states: int, cap: int):
        self.states = states
        self.cap = cap
        super().__init__(f"{what}: state cap {cap} exceeded ({states} states reached)")


class _Erase:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "ERASE"


ERASE = _Erase()

FINITE_WORD_CAP = 100_000


class FiniteAutomaton:
    def __init__(
        self,
        alphabet: Sequence[Hashable],
        n_states: int,
        initial: Iterable[int],
        accepting: Iterable[int],
        transitions: Iterable[tuple[int, Hashable, int]] | Sequence[dict],
    ):
        self.alphabet = tuple(alphabet)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise AutomatonError("duplicate alphabet symbols")
        self._symset = frozenset(self.alphabet)
        self.n = int(n_states)
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)
        for q in self.initial | self.accepting:
            if not 0 <= q < self.n:
                raise AutomatonError(f"state {q} out of range")
        succ: list[dict] = [dict() for _ in range(self.n)]
        if isinstance(transitions, (list, tuple)) and (not transitions or isinstance(transitions[0], dict)):
            for q, row in enumerate(transitions):
                for sym, tgt in row.items():
                    succ[q][sym] = (tgt,) if isinstance(tgt, (int, np.integer)) else tuple(sorted(set(tgt)))
        else:
            acc: list[dict] = [dict() for _ in range(self.n)]
            for p, sym, q in transitions:
                acc[p].setdefault(sym, set()).add(q)
            for p, row in enumerate(acc):
                for sym, tgts in row.items():
                    succ[p][sym] = tuple(sorted(tgts))
        for p, row in enumerate(succ):
            for sym, tgts in row.items():
                if sym not in self._symset:
                    raise AutomatonError(f"symbol {sym!r} not in alphabet")
                for q in tgts:
                    if not 0 <= q < self.n:
                        raise AutomatonError(f"transition target {q} out of range")
        self.succ = succ
        self.deterministic = len(self.initial) == 1 and all(
            len(t) == 1 for row in succ for t in row.values()
        )

    # --- basics -----------------------------------------------------------

    def __repr__(self):
        kind = "DFA" if self.deterministic else "NFA"
        return f"<{kind} states={self.n} |alphabet|={len(self.alphabet)} accepting={len(self.accepting)}>"

    @property
    def n_transitions(self) -> int:
        return sum(len(t) for row in self.succ for t in row.values())

    def step(self, states: Iterable[int], sym) -> frozenset:
        out = set()
        for q in states:
            out.update(self.succ[q].get(sym, ()))
        return frozenset(out)

    def accepts(self, word: Iterable[Hashable]) -> bool:
        cur = self.initial
        for sym in word:
            if sym not in self._symset:
                raise AlphabetMismatch(f"symbol {sym!r} not in alphabet")
            cur = self.step(cur, sym)
            if not cur:
                return False
        return bool(cur & self.accepting)

    def dstep(self, q: int, sym) -> int | None:
        t = self.succ[q].get(sym)
        return t[0] if t else None

    @property
    def start(self) -> int:
        if not self.deterministic:
            raise NotDeterministic("automaton is not deterministic")
        return next(iter(self.initial))

    def edges(self):
        for p, row in enumerate(self.succ):
            for sym, tgts in row.items():
                for q in tgts:
                    yield p, sym, q

    def to_json(self) -> dict:
        order = {s: i for i, s in enumerate(self.alphabet)}
        trans = sorted(self.edges(), key=lambda e: (e[0], order[e[1]], e[2]))
        return {
            "alphabet": [_jsonable(s) for s in self.alphabet],
            "states": self.n,
            "initial": sorted(self.initial),
            "accepting": sorted(self.accepting),
            "transitions": [[p, _jsonable(s), q] for p, s, q in trans],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FiniteAutomaton":
        conv = lambda s: tuple(s) if isinstance(s, list) else s  # noqa: E731
        alphabet = [conv(s) for s in doc["alphabet"]]
        return cls(
            alphabet,
            doc["states"],
            doc["initial"],
            doc["accepting"],
            [(p, conv(s), q) for p, s, q in doc["transitions"]],
        )


def _jsonable(s):
    if isinstance(s, tuple):
        return [_jsonable(x) for x in s]
    return s


# --- constructors ------------------------------------------------------------


def universal(alphabet) -> FiniteAutomaton:
    return FiniteAutomaton(alphabet, 1, [0], [0], [(0, s, 0) for s in alphabet])


def empty_language(alphabet) -> FiniteAutomaton:
    return FiniteAutomaton(alphabet, 1, [0], [], [])


def epsilon_only(alphabet) -> FiniteAutomaton:
    return FiniteAutomaton(alphabet, 1, [0], [0], [])


def dfa_from_function(
    alphabet: Sequence[Hashable],
    start,
    step: Callable[[Hashable, Hashable], Hashable | None],
    accept: Callable[[Hashable], bool],
    cap: int | None = None,
    what: str = "automaton",
) -> FiniteAutomaton:
    """Explore a deterministic machine given by a step function.

    ``step(state, sym)`` returns the next (hashable) state or ``None`` for
    the sink.  States are numbered in BFS order.
    """
    index = {start: 0}
    states = [start]
    trans: list[dict] = []
    i = 0
    while i < len(states):
        s = states[i]
        row = {}
        for sym in alphabet:
            t = step(s, sym)
            if t is None:
                continue
            j = index.get(t)
            if j is None:
                j = index[t] = len(states)
                states.append(t)
                if cap is not None and len(states) > cap:
                    raise ResourceCapExceeded(what, len(states), cap)
            row[sym] = j
        trans.append(row)
        i += 1
    acc = [k for k, s in enumerate(states) if accept(s)]
    return FiniteAutomaton(alphabet, len(states), [0], acc, trans)


def nfa_from_function(
    alphabet: Sequence[Hashable],
    starts: Iterable[Hashable],
    step: Callable[[Hashable, Hashable], Iterable[Hashable]],
    accept: Callable[[Hashable], bool],
    cap: int | None = None,
    what: str = "automaton",
) -> FiniteAutomaton:
    """Explore a nondeterministic machine with lazily generated states."""
    index: dict = {}
    states: list = []
    for s in starts:
        if s not in index:
            index[s] = len(states)
            states.append(s)
    init = list(range(len(states)))
    edges = []
    i = 0
    while i < len(states):
        s = states[i]
        for sym in alphabet:
            for t in step(s, sym):
                j = index.get(t)
                if j is None:
                    j = index[t] = len(states)
                    states.append(t)
                    if cap is not None and len(states) > cap:
                        raise ResourceCapExceeded(what, len(states), cap)
                edges.append((i, sym, j))
        i += 1
    acc = [k for k, s in enumerate(states) if accept(s)]
    return FiniteAutomaton(alphabet, len(states), init, acc, edges)


# --- determinisation and minimisation ---------------------------------------


def determinize(a: FiniteAutomaton, cap: int | None = None) -> FiniteAutomaton:
    """Subset construction; the empty subset is left implicit."""
    if a.deterministic:
        return a
    start = frozenset(a.initial)
    return dfa_from_function(
        a.alphabet,
        start,
        lambda S, sym: a.step(S, sym) or None,
        lambda S: bool(S & a.accepting),
        cap=cap,
        what="subset construction",
    )


def _complete_table(d: FiniteAutomaton) -> tuple[np.ndarray, np.ndarray]:
    """Dense transition table of a DFA with an explicit sink as the last row."""
    n, k = d.n, len(d.alphabet)
    sink = n
    T = np.full((n + 1, k), sink, dtype=np.int64)
    for p, row in enumerate(d.succ):
        for j, sym in enumerate(d.alphabet):
            t = row.get(sym)
            if t:
                T[p, j] = t[0]
    acc = np.zeros(n + 1, dtype=bool)
    acc[list(d.accepting)] = True
    return T, acc


def minimize(a: FiniteAutomaton) -> FiniteAutomaton:
    """Minimal trim DFA (no dead states; the sink stays implicit).

    States are renumbered in BFS order from the start state following the
    alphabet order, so equal languages give identical automata.
    """
    d = determinize(a)
    T, acc = _complete_table(d)
    start = d.start
    # Moore refinement
    cls = acc.astype(np.int64)
    n_cls = len(np.unique(cls))
    while True:
        sig = np.concatenate([cls[:, None], cls[T]], axis=1)
        _, new = np.unique(sig, axis=0, return_inverse=True)
        new = new.reshape(-1)
        m = int(new.max()) + 1
        cls = new
        if m == n_cls:
            break
        n_cls = m
    sink_cls = cls[d.n]
    if cls[start] == sink_cls:
        return empty_language(d.alphabet)
    # BFS renumbering over classes, skipping the dead class
    order = {int(cls[start]): 0}
    queue = deque([int(cls[start])])
    rep = {}
    for q in range(d.n + 1):
        rep.setdefault(int(cls[q]), q)
    trans = []
    accepting = []
    while queue:
        c = queue.popleft()
        q = rep[c]
        row = {}
        for j, sym in enumerate(d.alphabet):
            t = int(cls[T[q, j]])
            if t == sink_cls:
                continue
            if t not in order:
                order[t] = len(order)
                queue.append(t)
            row[sym] = order[t]
        trans.append(row)
        if acc[q]:
            accepting.append(order[c])
    return FiniteAutomaton(d.alphabet, len(order), [0], accepting, trans)


def determinize_minimize(a: FiniteAutomaton) -> FiniteAutomaton:
    return minimize(a)


def complement(a: FiniteAutomaton) -> FiniteAutomaton:
    d = determinize(a)
    T, acc = _complete_table(d)
    n = d.n + 1
    trans = [{sym: int(T[p, j]) for j, sym in enumerate(d.alphabet)} for p in range(n)]
    accepting = [p for p in range(n) if not acc[p]]
    return minimize(FiniteAutomaton(d.alphabet, n, [d.start], accepting, trans))


# --- boolean operations ------------------------------------------------------


def _check_alphabets(a: FiniteAutomaton, b: FiniteAutomaton):
    if set(a.alphabet) != set(b.alphabet):
        raise AlphabetMismatch("automata are over different alphabets")


def product(a: FiniteAutomaton, b: FiniteAutomaton, accept: Callable[[bool, bool], bool], cap=None) -> FiniteAutomaton:
    """Synchronous product of the two determinised automata.

    ``None`` components stand for the implicit sink of either side.
    """
    _check_alphabets(a, b)
    da, db = determinize(a), determinize(b)
    keep_sinks = accept(False, False) or accept(True, False) or accept(False, True)

    def step(s, sym):
        p, q = s
        p2 = da.dstep(p, sym) if p is not None else None
        q2 = db.dstep(q, sym) if q is not None else None
        if p2 is None and q2 is None:
            return None
        if not keep_sinks and (p2 is None or q2 is None):
            return None
        return (p2, q2)

    def acc(s):
        p, q = s
        return accept(p is not None and p in da.accepting, q is not None and q in db.accepting)

    return dfa_from_function(a.alphabet, (da.start, db.start), step, acc, cap=cap, what="product")


def intersection(a, b, cap=None):
    return minimize(product(a, b, lambda x, y: x and y, cap))


def union(a, b, cap=None):
    return minimize(product(a, b, lambda x, y: x or y, cap))


def difference(a, b, cap=None):
    return minimize(product(a, b, lambda x, y: x and not y, cap))


def nfa_union(automata: Sequence[FiniteAutomaton]) -> FiniteAutomaton:
    """Disjoint union, without determinising."""
    if not automata:
        raise AutomatonError("need at least one automaton")
    alph = automata[0].alphabet
    for x in automata[1:]:
        _check_alphabets(automata[0], x)
    off = 0
    init, acc, edges = [], [], []
    for x in automata:
        init += [q + off for q in x.initial]
        acc += [q + off for q in x.accepting]
        edges += [(p + off, s, q + off) for p, s, q in x.edges()]
        off += x.n
    return FiniteAutomaton(alph, off, init, acc, edges)


def boolean_ops(a: FiniteAutomaton, b: FiniteAutomaton, op: str) -> FiniteAutomaton:
    fn = {"union": union, "intersection": intersection, "difference": difference}.get(op)
    if fn is None:
        raise ValueError(f"unknown operation {op!r}")
    return fn(a, b)


# --- morphic images ----------------------------------------------------------


def project(a: FiniteAutomaton, symbol_map, alphabet: Sequence[Hashable] | None = None) -> FiniteAutomaton:
    """Image under a letter-to-letter-or-ERASE morphism, epsilon-free NFA.

    ``symbol_map`` is a dict or a callable.  The output alphabet defaults to
    the image of the input alphabet (in first-occurrence order).
    """
    f = symbol_map if callable(symbol_map) else symbol_map.__getitem__
    image = {s: f(s) for s in a.alphabet}
    if alphabet is None:
        seen = []
        for s in a.alphabet:
            t = image[s]
            if t is not ERASE and t not in seen:
                seen.append(t)
        alphabet = seen
    eps: list[set] = [set() for _ in range(a.n)]
    moves: list[dict] = [dict() for _ in range(a.n)]
    for p, s, q in a.edges():
        t = image[s]
        if t is ERASE:
            eps[p].add(q)
        else:
            moves[p].setdefault(t, set()).add(q)
    closure = _eps_closures(eps)
    edges = []
    acc = []
    for p in range(a.n):
        cl = closure[p]
        if cl & a.accepting:
            acc.append(p)
        for r in cl:
            for t, qs in moves[r].items():
                for q in qs:
                    edges.append((p, t, q))
    return FiniteAutomaton(alphabet, a.n, a.initial, acc, edges)


def _eps_closures(eps: list[set]) -> list[frozenset]:
    out = []
    for p in range(len(eps)):
        seen = {p}
        stack = [p]
        while stack:
            r = stack.pop()
            for q in eps[r]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        out.append(frozenset(seen))
    return out


def relabel(a: FiniteAutomaton, symbol_map, alphabet) -> FiniteAutomaton:
    """Inverse image of a letter map: ``symbol_map`` sends each NEW symbol
    to an old symbol (or ``None`` to disallow it)."""
    f = symbol_map if callable(symbol_map) else symbol_map.get
    edges = []
    for new in alphabet:
        old = f(new)
        if old is None:
            continue
        for p in range(a.n):
            for q in a.succ[p].get(old, ()):
                edges.append((p, new, q))
    return FiniteAutomaton(alphabet, a.n, a.initial, a.accepting, edges)


# --- structure and languages ---------------------------------------------------


def _reachable(a: FiniteAutomaton) -> set:
    seen = set(a.initial)
    stack = list(seen)
    while stack:
        p = stack.pop()
        for tgts in a.succ[p].values():
            for q in tgts:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
    return seen


def _coreachable(a: FiniteAutomaton) -> set:
    pred: list[set] = [set() for _ in range(a.n)]
    for p, _, q in a.edges():
        pred[q].add(p)
    seen = set(a.accepting)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for p in pred[q]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def trim(a: FiniteAutomaton) -> FiniteAutomaton:
    keep = sorted(_reachable(a) & _coreachable(a))
    idx = {q: i for i, q in enumerate(keep)}
    edges = [(idx[p], s, idx[q]) for p, s, q in a.edges() if p in idx and q in idx]
    init = [idx[q] for q in a.initial if q in idx]
    acc = [idx[q] for q in a.accepting if q in idx]
    return FiniteAutomaton(a.alphabet, len(keep), init, acc, edges)


def is_empty(a: FiniteAutomaton) -> bool:
    return not (_reachable(a) & a.accepting)


def equivalent(a: FiniteAutomaton, b: FiniteAutomaton) -> bool:
    return is_empty(product(a, b, lambda x, y: x != y))


@dataclass(frozen=True)
class Empty:
    kind: str = "Empty"


@dataclass(frozen=True)
class Finite:
    max_length: int
    words: tuple
    kind: str = "Finite"


@dataclass(frozen=True)
class Infinite:
    u: tuple
    v: tuple
    w: tuple
    kind: str = "Infinite"

    def member(self, k: int) -> tuple:
        return self.u + self.v * k + self.w


def _bfs_path(a: FiniteAutomaton, sources: Iterable[int], targets: set, allowed: set) -> tuple | None:
    """Shortest word from some source to some target inside ``allowed``."""
    order = {s: i for i, s in enumerate(a.alphabet)}
    prev = {}
    queue = deque()
    for s in sorted(sources):
        if s in allowed and s not in prev:
            prev[s] = None
            queue.append(s)
    while queue:
        p = queue.popleft()
        if p in targets:
            word = []
            while prev[p] is not None:
                p, sym = prev[p]
                word.append(sym)
            return tuple(reversed(word))
        for sym in sorted(a.succ[p], key=order.__getitem__):
            for q in a.succ[p][sym]:
                if q in allowed and q not in prev:
                    prev[q] = (p, sym)
                    queue.append(q)
    return None


def find_pump(a: FiniteAutomaton, through: Callable[[Hashable], bool] | None = None) -> Infinite | None:
    """A decomposition u v* w inside L(a) whose loop ``v`` contains at least
    one symbol satisfying ``through`` (any symbol if ``None``)."""
    live = _reachable(a) & _coreachable(a)
    if not live:
        return None
    ok = through or (lambda s: True)

    g = nx.DiGraph()
    g.add_nodes_from(live)
    g.add_edges_from((p, q) for p, _, q in a.edges() if p in live and q in live)
    comps = [sorted(c) for c in nx.strongly_connected_components(g)]
    comp_of = {q: i for i, c in enumerate(comps) for q in c}
    best = None
    order = {s: i for i, s in enumerate(a.alphabet)}
    for p in sorted(live):
        for sym in sorted(a.succ[p], key=order.__getitem__):
            if not ok(sym):
                continue
            for q in a.succ[p][sym]:
                if q not in live or comp_of[q] != comp_of[p]:
                    continue
                comp = set(comps[comp_of[p]])
                back = _bfs_path(a, [q], {p}, comp)
                u = _bfs_path(a, a.initial, {p}, live)
                w = _bfs_path(a, [p], set(a.accepting), live)
                cand = (u, (sym,) + back, w)
                key = (len(cand[0]) + len(cand[1]) + len(cand[2]), len(cand[1]))
                if best is None or key < best[0]:
                    best = (key, cand)
    if best is None:
        return None
    u, v, w = best[1]
    # rotate so that the loop starts at p: u reaches p, v loops at p, w leaves p
    return Infinite(u, v, w)


def classify_language(a: FiniteAutomaton, word_cap: int = FINITE_WORD_CAP):
    t = trim(a)
    if t.n == 0 or not t.initial:
        return Empty()
    pump = find_pump(t)
    if pump is not None:
        return Infinite(pump.u, pump.v, pump.w)
    # acyclic: longest path and full enumeration
    words = set()
    order = {s: i for i, s in enumerate(t.alphabet)}
    stack = [(q, ()) for q in t.initial]
    while stack:
        q, w = stack.pop()
        if q in t.accepting:
            words.add(w)
            if len(words) > word_cap:
                raise LanguageTooLarge(f"more than {word_cap} words in a finite language")
        for sym, tgts in t.succ[q].items():
            for r in tgts:
                stack.append((r, w + (sym,)))
    ws = tuple(sorted(words, key=lambda w: (len(w), [order[s] for s in w])))
    return Finite(max(len(w) for w in ws), ws)


def enumerate_words(alphabet, max_len: int):
    yield ()
    frontier = [()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for s in alphabet:
                nxt.append(w + (s,))
        yield from nxt
        frontier = nxt


# --- transition monoid ---------------------------------------------------------


def transition_monoid(a: FiniteAutomaton) -> tuple[FiniteMonoid, MonoidMorphism]:
    """Monoid of state transformations induced by words, left-to-right.

    The sink is made explicit (as the last state) when the DFA is partial.
    ``mu(uv) = mu(u) * mu(v)`` where the product first applies ``u``.
    """
    if not a.deterministic:
        raise NotDeterministic("transition monoid needs a deterministic automaton")
    T, _ = _complete_table(a)
    complete = all(len(row) == len(a.alphabet) for row in a.succ)
    if complete:
        T = T[: a.n]
    n = T.shape[0]
    letter_fn = {sym: tuple(int(v) for v in T[:, j]) for j, sym in enumerate(a.alphabet)}
    ident = tuple(range(n))

    def then(f, g):  # apply f, then g
        return tuple(g[f[q]] for q in range(n))

    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for f in frontier:
            for g in letter_fn.values():
                h = then(f, g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    order = [ident] + sorted(seen - {ident})
    idx = {f: i for i, f in enumerate(order)}
    table = [[idx[then(f, g)] for g in order] for f in order]
    m = FiniteMonoid(table, 0, [transformation_name(f) for f in order], check=False)
    m.functions = None
    mu = MonoidMorphism(a.alphabet, m, {sym: idx[f] for sym, f in letter_fn.items()})
    return m, mu
