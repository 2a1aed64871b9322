"""Regular language of encodings of bad forest paths.

Encodings use the alphabet ``{("<", e), (">", e) : e idempotent}`` plus
the letter ids; a well-formed word is ``<e w_1 >e <e w_2 >e ...`` with at
least one block, every ``w_i`` nonempty and evaluating to ``e``.

For one idempotent ``e`` and one context ``(a, b)`` a nondeterministic
automaton reads words whose letters carry a copy bit (left/right) and
accepts when the placement is not an embedding: a left bit in the first
block, a right bit in the last block, or a pair of vertices on different
sides whose edge bit changes.  Its complement, with copy bits projected
away, is the set of paths that are good in that context.  Intersecting
over all contexts and subtracting from the well-formed words gives the
bad paths.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from . import automata as fa
from .forestpath import CLOSE, OPEN
from .mlgraph import EdgeSelector
from .monoid import FiniteMonoid

L, R = False, True


def is_bracket(sym) -> bool:
    return isinstance(sym, tuple) and isinstance(sym[0], str)


def encoding_alphabet(m: FiniteMonoid, letters: Sequence[int]) -> list:
    out = []
    for e in m.idempotents:
        out += [(OPEN, e), (CLOSE, e)]
    return out + list(letters)


def well_formed(m: FiniteMonoid, letters: Sequence[int], e: int, alphabet=None) -> fa.FiniteAutomaton:
    """Blocks ``<e w >e`` (one or more), ``w`` nonempty with product ``e``."""
    op, cl = (OPEN, e), (CLOSE, e)
    alphabet = alphabet or [op, cl] + list(letters)
    letterset = set(letters)

    # states: "init", "between", ("in", value or None)
    def step(s, sym):
        if sym == op:
            return ("in", None) if s in ("init", "between") else None
        if sym == cl:
            return "between" if isinstance(s, tuple) and s[1] == e else None
        if sym in letterset and isinstance(s, tuple):
            return ("in", sym if s[1] is None else m.mul(s[1], sym))
        return None

    return fa.minimize(fa.dfa_from_function(alphabet, "init", step, lambda s: s == "between"))


class _Violation:
    """Step function of the violation automaton for one ``(e, a, b)``."""

    def __init__(self, m: FiniteMonoid, pedge: EdgeSelector, e: int, a: int, b: int, guess=None, shared=None):
        self.m, self.P, self.e, self.a, self.b = m, pedge, e, a, b
        # _violations does not depend on the guess, so callers may share its cache
        self._vcache = {} if shared is None else shared
        self._scache: dict = {}
        self.op, self.cl = (OPEN, e), (CLOSE, e)
        self.one = m.identity
        # guess: None = everything; "frame" = only the first/last block
        # rules; (lx, copy, first) = only pairs whose left vertex has that type
        self.guess = guess
        self.start = ("S", False, False, self.one)

    def step(self, s, sym):
        key = (s, sym)
        out = self._scache.get(key)
        if out is None:
            out = self._scache[key] = self._step(s, sym)
        return out

    def _step(self, s, sym):
        m = self.m
        mul = m.mul
        e, a, one = self.e, self.a, self.one
        kind = s if isinstance(s, str) else s[0]
        if kind == "ACC":
            return (s,)
        if sym == self.op:
            if kind == "S":
                _, sc, inside, _ = s
                return () if inside else (("S", sc, True, one),)
            if kind == "X":
                _, pre_x, lx, cx, first, rx, cc, cur, inside = s
                return () if inside else (("X", pre_x, lx, cx, first, rx, cc, one, True),)
            if kind == "W":
                return ("ACC",) if s[2] else ()
            return ()
        if sym == self.cl:
            if kind == "S":
                _, sc, inside, _ = s
                return (("S", True, False, one),) if inside else ()
            if kind == "LASTL":
                return (("LASTL", True),) if not s[1] else ()
            if kind == "X":
                _, pre_x, lx, cx, first, rx, cc, cur, inside = s
                if not inside:
                    return ()
                if cc >= 1 and cx == L:
                    # a left vertex two blocks back keeps every edge bit
                    return ()
                return (("X", pre_x, lx, cx, first, rx, min(cc + 1, 2), one, False),)
            if kind == "Y":
                _, V, ry = s
                return (("W", (ry, True) in V, (ry, False) in V),)
            return ()
        x, cp = sym
        if kind == "S":
            _, sc, inside, c = s
            if not inside:
                return ()
            out = [("S", sc, True, mul(c, x))]
            g = self.guess
            if g is None or g == "frame":
                if not sc and cp == R:
                    out.append("ACC")
                if cp == L:
                    out.append(("LASTL", False))
            lx = mul(c, x)
            if g is None or g == (lx, cp, not sc):
                pre_x = mul(a, mul(e, lx)) if sc else mul(a, lx)
                out.append(("X", pre_x, lx, cp, not sc, one, 0, one, True))
            return tuple(out)
        if kind == "LASTL":
            return (s,) if not s[1] else ()
        if kind == "X":
            _, pre_x, lx, cx, first, rx, cc, cur, inside = s
            if not inside:
                return ()
            if cc == 0:
                stay = ("X", pre_x, lx, cx, first, mul(rx, x), cc, cur, True)
            else:
                stay = ("X", pre_x, lx, cx, first, rx, cc, mul(cur, x), True)
            out = [stay]
            if cp != cx:
                V = self._violations(pre_x, lx, cx, first, rx, cc, cur, x)
                if V:
                    out.append(("Y", V, one))
            return tuple(out)
        if kind == "Y":
            _, V, ry = s
            return (("Y", V, mul(ry, x)),)
        return ()

    def _violations(self, *args):
        out = self._vcache.get(args)
        if out is None:
            out = self._vcache[args] = self._compute_violations(*args)
        return out

    def _compute_violations(self, pre_x, lx, cx, first, rx, cc, cur, y):
        m = self.m
        mul = m.mul
        e, a, b, P = self.e, self.a, self.b, self.P
        if cc == 0:
            infix = mul(rx, y)
            ly = mul(lx, infix)
            mid = infix
        else:
            ly = mul(cur, y)
            mid = mul(rx, ly) if cc == 1 else mul(mul(rx, e), ly)
        j_gt_1 = cc >= 1 or not first
        pre_y = mul(a, mul(e, ly)) if j_gt_1 else mul(a, ly)
        out = set()
        for r in m.elements:
            for last in (True, False):
                suf_y = mul(r, b) if last else mul(mul(r, e), b)
                rx_full = mul(infix, r) if cc == 0 else rx
                i_lt_n = True if cc >= 1 else not last
                suf_x = mul(mul(rx_full, e), b) if i_lt_n else mul(rx_full, b)
                orig = (pre_x, mid, suf_y) in P
                if cx == L:
                    img = (pre_x, mul(mul(rx_full, e), ly), suf_y) in P
                else:
                    img = (pre_y, mul(mul(r, e), lx), suf_x) in P
                if img != orig:
                    out.add((r, last))
        return frozenset(out)

    @staticmethod
    def accepting(s) -> bool:
        if s == "ACC":
            return True
        if isinstance(s, tuple) and s[0] == "LASTL":
            return s[1]
        if isinstance(s, tuple) and s[0] == "W":
            return s[1]
        return False


def _normalise(states: set) -> frozenset:
    """Canonical subset: absorbing acceptance wins; pending right vertices
    with the same running suffix are merged."""
    if "ACC" in states:
        return frozenset(("ACC",))
    ys: dict = {}
    w = [False, False]
    rest = set()
    for s in states:
        if isinstance(s, tuple) and s[0] == "Y":
            ys[s[2]] = ys.get(s[2], frozenset()) | s[1]
        elif isinstance(s, tuple) and s[0] == "W":
            w[0] |= s[1]
            w[1] |= s[2]
        else:
            rest.add(s)
    rest.update(("Y", V, r) for r, V in ys.items())
    if w[0] or w[1]:
        rest.add(("W", w[0], w[1]))
    return frozenset(rest)


def annotated_alphabet(e: int, letters: Sequence[int]) -> list:
    return [(OPEN, e), (CLOSE, e)] + [(x, bit) for x in letters for bit in (L, R)]


def violation_dfa(m, pedge, letters, e, a, b, guess=None, cap=None, shared=None) -> fa.FiniteAutomaton:
    """Determinised violation automaton over the annotated alphabet."""
    v = _Violation(m, pedge, e, a, b, guess, shared)

    def step(S, sym):
        out: set = set()
        for s in S:
            out.update(v.step(s, sym))
        return _normalise(out) if out else None

    return fa.dfa_from_function(
        annotated_alphabet(e, letters),
        frozenset((v.start,)),
        step,
        lambda S: any(v.accepting(s) for s in S),
        cap=cap,
        what="violation automaton",
    )


def violation_nfa(m, pedge, letters, e, a, b, cap=None) -> fa.FiniteAutomaton:
    """The raw nondeterministic violation automaton (for inspection and tests)."""
    v = _Violation(m, pedge, e, a, b)
    return fa.nfa_from_function(annotated_alphabet(e, letters), [v.start], v.step, v.accepting, cap=cap, what="violation automaton")


def _guess_types(m, letters, e):
    yield "frame"
    for lx in m.elements:
        for cp in (L, R):
            for first in (True, False):
                yield (lx, cp, first)


def good_annotated(m, pedge, letters, e, a, b, cap=None) -> fa.FiniteAutomaton:
    """Annotated words with no violation in context ``(a, b)``.

    The violation language is a union over the type of the guessed left
    vertex; each part is complemented on its own and the results are
    intersected, which keeps every subset construction small.
    """
    good = None
    shared: dict = {}
    for g in _guess_types(m, letters, e):
        part = fa.minimize(fa.complement(violation_dfa(m, pedge, letters, e, a, b, g, cap, shared)))
        good = part if good is None else fa.intersection(good, part, cap)
    return good


def good_in_context(m, pedge, letters, e, a, b, cap=None) -> fa.FiniteAutomaton:
    """Plain words having some copy placement without violation at ``(a, b)``."""
    ok = good_annotated(m, pedge, letters, e, a, b, cap)
    plain = [(OPEN, e), (CLOSE, e)] + list(letters)
    return fa.minimize(fa.determinize(fa.project(ok, lambda s: s if is_bracket(s) else s[0], plain), cap=cap))


@dataclass
class BadnessAutomaton:
    """Bad-path language, kept per idempotent and context as well.

    ``per_context[(e, a, b)]`` recognises the well-formed ``e``-encodings
    that are bad in context ``(a, b)``; ``automaton`` is their union over
    the full encoding alphabet.
    """

    monoid: FiniteMonoid
    automaton: fa.FiniteAutomaton
    per_context: dict
    letters: tuple
    states_peak: int

    def accepts(self, word) -> bool:
        return self.automaton.accepts(word)


def _lift(d: fa.FiniteAutomaton, alphabet) -> fa.FiniteAutomaton:
    return fa.FiniteAutomaton(alphabet, d.n, d.initial, d.accepting, list(d.edges()))


def badness_automaton(m: FiniteMonoid, pedge: EdgeSelector, letters: Sequence | None = None, cap: int | None = 200_000) -> BadnessAutomaton:
    """Minimal DFA of the encodings of bad forest paths over ``letters``
    (all elements by default)."""
    letters = tuple(sorted(set(m.elements if letters is None else (m.id_of(x) for x in letters))))
    alphabet = encoding_alphabet(m, letters)
    per_ctx = {}
    peak = 0
    for e in m.idempotents:
        wf = well_formed(m, letters, e)
        for a, b in itertools.product(m.elements, repeat=2):
            g = good_in_context(m, pedge, letters, e, a, b, cap)
            peak = max(peak, g.n)
            per_ctx[(e, a, b)] = _lift(fa.difference(wf, g, cap), alphabet)
    total = fa.minimize(fa.determinize(fa.nfa_union(list(per_ctx.values())), cap=cap))
    return BadnessAutomaton(m, total, per_ctx, letters, peak)
