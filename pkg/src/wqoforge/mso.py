"""Monadic second-order logic on finite words.

Grammar (whitespace-insensitive; ``#`` starts a comment)::

    formula  := quant | implies
    quant    := ("exists1" | "forall1" | "exists2" | "forall2") VAR "." formula
    implies  := disj ["implies" implies]
    disj     := conj {"or" conj}
    conj     := unary {"and" unary}
    unary    := "not" unary | quant | "(" formula ")" | atom
    atom     := "true" | "false"
              | VAR ("<" | "<=" | "=" | "!=") VAR
              | VAR "in" VAR
              | "letter" "(" SYM "," VAR ")"
              | "prod" "(" SYM "," VAR "," VAR ")"

A quantifier body extends as far right as possible.  ``SYM`` is an
identifier, a number or a double-quoted string.  ``prod(m, x, y)`` holds
when the product of the letter images at positions in ``(x, y]`` is ``m``
(the empty product ``1`` when ``y <= x``).

Positions are 0-based internally.  A formula over first-order variables
``V1`` and set variables ``V2`` compiles to a DFA over symbols
``(letter, bits)`` where ``bits[k]`` marks membership of the position in
the k-th variable; first-order tracks carry exactly one mark.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Sequence

from . import automata as fa
from .monoid import MonoidMorphism


class MsoError(ValueError):
    pass


class MsoSyntaxError(MsoError):
    def __init__(self, msg: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line, self.column = line, col
        super().__init__(f"{msg} at line {line}, column {col}")


class UnknownLetter(MsoError):
    pass


class UnboundVariable(MsoError):
    pass


class SortError(MsoError):
    pass


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Rel:
    op: str  # "<", "<=", "=", "!="
    x: str
    y: str


@dataclass(frozen=True)
class In:
    x: str
    X: str


@dataclass(frozen=True)
class Letter:
    sym: str
    x: str


@dataclass(frozen=True)
class Prod:
    elem: str
    x: str
    y: str


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quant:
    kind: str  # exists / forall
    order: int  # 1 or 2
    var: str
    body: "Formula"


Formula = Const | Rel | In | Letter | Prod | Not | And | Or | Implies | Quant

TRUE, FALSE = Const(True), Const(False)


def render(f: Formula) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Rel):
        return f"{f.x} {f.op} {f.y}"
    if isinstance(f, In):
        return f"{f.x} in {f.X}"
    if isinstance(f, Letter):
        return f"letter({_sym(f.sym)}, {f.x})"
    if isinstance(f, Prod):
        return f"prod({_sym(f.elem)}, {f.x}, {f.y})"
    if isinstance(f, Not):
        return f"not {_paren(f.sub)}"
    if isinstance(f, (And, Or, Implies)):
        op = {And: "and", Or: "or", Implies: "implies"}[type(f)]
        return f"{_paren(f.left)} {op} {_paren(f.right)}"
    if isinstance(f, Quant):
        return f"{f.kind}{f.order} {f.var}. {render(f.body)}"
    raise TypeError(f)


def _sym(s: str) -> str:
    return s if re.fullmatch(r"[A-Za-z0-9_]+", s) else '"' + s.replace('"', '\\"') + '"'


def _paren(f: Formula) -> str:
    if isinstance(f, (Const, Rel, In, Letter, Prod)):
        return render(f)
    return f"({render(f)})"


# --- parser ----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<op><=|!=|<|=|\(|\)|,|\.)
  | (?P<word>[A-Za-z0-9_']+)
    """,
    re.VERBOSE,
)

_KEYWORDS = {
    "exists1", "forall1", "exists2", "forall2", "and", "or", "not", "implies",
    "in", "true", "false", "letter", "prod",
}


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise MsoSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if kind == "str":
                val = re.sub(r"\\(.)", r"\1", val[1:-1])
            out.append(_Tok(kind, val, pos))
        pos = m.end()
    out.append(_Tok("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise MsoSyntaxError(msg, self.text, tok.pos)

    def expect(self, text):
        t = self.next()
        if t.text != text or t.kind == "str":
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}", t)
        return t

    def is_kw(self, word):
        t = self.peek()
        return t.kind == "word" and t.text == word

    def var(self) -> str:
        t = self.next()
        if t.kind != "word" or t.text in _KEYWORDS:
            self.error(f"expected a variable, found {t.text or 'end of input'!r}", t)
        return t.text

    def sym(self) -> str:
        t = self.next()
        if t.kind not in ("word", "str"):
            self.error(f"expected a symbol, found {t.text or 'end of input'!r}", t)
        return t.text

    def formula(self):
        t = self.peek()
        if t.kind == "word" and t.text in ("exists1", "forall1", "exists2", "forall2"):
            return self.quant()
        return self.implies()

    def quant(self):
        t = self.next()
        v = self.var()
        self.expect(".")
        body = self.formula()
        return Quant(t.text[:-1], int(t.text[-1]), v, body)

    def implies(self):
        left = self.disj()
        if self.is_kw("implies"):
            self.next()
            return Implies(left, self.formula())
        return left

    def disj(self):
        f = self.conj()
        while self.is_kw("or"):
            self.next()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.is_kw("and"):
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self):
        t = self.peek()
        if t.kind == "word" and t.text == "not":
            self.next()
            return Not(self.unary())
        if t.kind == "word" and t.text in ("exists1", "forall1", "exists2", "forall2"):
            return self.quant()
        if t.kind == "op" and t.text == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def atom(self):
        t = self.peek()
        if t.kind == "word" and t.text in ("true", "false"):
            self.next()
            return Const(t.text == "true")
        if t.kind == "word" and t.text == "letter":
            self.next()
            self.expect("(")
            s = self.sym()
            self.expect(",")
            x = self.var()
            self.expect(")")
            return Letter(s, x)
        if t.kind == "word" and t.text == "prod":
            self.next()
            self.expect("(")
            m = self.sym()
            self.expect(",")
            x = self.var()
            self.expect(",")
            y = self.var()
            self.expect(")")
            return Prod(m, x, y)
        x = self.var()
        op = self.next()
        if op.kind == "word" and op.text == "in":
            return In(x, self.var())
        if op.kind == "op" and op.text in ("<", "<=", "=", "!="):
            return Rel(op.text, x, self.var())
        self.error(f"expected a relation after {x!r}", op)


def parse_formula(
    text: str,
    alphabet: Sequence[str] | None = None,
    free_vars: dict[str, int] | Sequence[str] | None = None,
    morphism: MonoidMorphism | None = None,
) -> Formula:
    """Parse ``text``; if ``alphabet``/``free_vars`` are given, also check it.

    ``free_vars`` maps names to orders (1 or 2); a plain sequence means all
    first-order.
    """
    p = _Parser(text)
    if p.peek().kind == "eof":
        p.error("empty formula")
    f = p.formula()
    if p.peek().kind != "eof":
        p.error(f"unexpected {p.peek().text!r}")
    if alphabet is not None or free_vars is not None:
        check_formula(f, alphabet, free_vars or {}, morphism)
    return f


def _as_env(free_vars) -> dict[str, int]:
    if isinstance(free_vars, dict):
        return dict(free_vars)
    return {v: 1 for v in free_vars}


def check_formula(f: Formula, alphabet, free_vars, morphism=None) -> None:
    env = _as_env(free_vars)
    letters = set(alphabet) if alphabet is not None else None

    def need(v, order, env):
        if v not in env:
            raise UnboundVariable(f"variable {v!r} is not bound")
        if env[v] != order:
            kind = "position" if order == 1 else "set"
            raise SortError(f"variable {v!r} used as a {kind} variable")

    def go(f, env):
        if isinstance(f, Const):
            return
        if isinstance(f, Rel):
            need(f.x, 1, env)
            need(f.y, 1, env)
        elif isinstance(f, In):
            need(f.x, 1, env)
            need(f.X, 2, env)
        elif isinstance(f, Letter):
            need(f.x, 1, env)
            if letters is not None and f.sym not in letters:
                raise UnknownLetter(f"letter {f.sym!r} is not in the alphabet {sorted(letters)}")
        elif isinstance(f, Prod):
            need(f.x, 1, env)
            need(f.y, 1, env)
            if morphism is None:
                raise MsoError("prod(...) needs a declared monoid morphism")
            try:
                morphism.target.id_of(f.elem)
            except KeyError:
                raise MsoError(f"unknown monoid element {f.elem!r} in prod(...)") from None
        elif isinstance(f, Not):
            go(f.sub, env)
        elif isinstance(f, (And, Or, Implies)):
            go(f.left, env)
            go(f.right, env)
        elif isinstance(f, Quant):
            go(f.body, {**env, f.var: f.order})
        else:
            raise TypeError(f)

    go(f, env)


def free_variables(f: Formula) -> set[str]:
    if isinstance(f, Const):
        return set()
    if isinstance(f, Rel):
        return {f.x, f.y}
    if isinstance(f, In):
        return {f.x, f.X}
    if isinstance(f, Letter):
        return {f.x}
    if isinstance(f, Prod):
        return {f.x, f.y}
    if isinstance(f, Not):
        return free_variables(f.sub)
    if isinstance(f, (And, Or, Implies)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, Quant):
        return free_variables(f.body) - {f.var}
    raise TypeError(f)


def _all_names(f: Formula) -> set[str]:
    if isinstance(f, Quant):
        return {f.var} | _all_names(f.body)
    if isinstance(f, Not):
        return _all_names(f.sub)
    if isinstance(f, (And, Or, Implies)):
        return _all_names(f.left) | _all_names(f.right)
    return free_variables(f)


def substitute(f: Formula, mapping: dict[str, str]) -> Formula:
    """Rename free variables, renaming bound ones that would capture."""
    avoid = set(mapping.values()) | _all_names(f)

    def fresh(v):
        k = 1
        while f"{v}_{k}" in avoid:
            k += 1
        avoid.add(f"{v}_{k}")
        return f"{v}_{k}"

    def go(f, m):
        r = lambda v: m.get(v, v)  # noqa: E731
        if isinstance(f, Const):
            return f
        if isinstance(f, Rel):
            return Rel(f.op, r(f.x), r(f.y))
        if isinstance(f, In):
            return In(r(f.x), r(f.X))
        if isinstance(f, Letter):
            return Letter(f.sym, r(f.x))
        if isinstance(f, Prod):
            return Prod(f.elem, r(f.x), r(f.y))
        if isinstance(f, Not):
            return Not(go(f.sub, m))
        if isinstance(f, (And, Or, Implies)):
            return type(f)(go(f.left, m), go(f.right, m))
        if isinstance(f, Quant):
            inner = {k: v for k, v in m.items() if k != f.var}
            if f.var in inner.values():
                new = fresh(f.var)
                inner[f.var] = new
                return Quant(f.kind, f.order, new, go(f.body, inner))
            return Quant(f.kind, f.order, f.var, go(f.body, inner))
        raise TypeError(f)

    return go(f, dict(mapping))


def conj(*fs: Formula) -> Formula:
    out = None
    for f in fs:
        if f == TRUE:
            continue
        out = f if out is None else And(out, f)
    return out if out is not None else TRUE


# --- desk oracle: direct model checking --------------------------------------


def holds(f: Formula, word: Sequence[Hashable], assignment: dict, morphism: MonoidMorphism | None = None) -> bool:
    """Evaluate ``f`` on ``word`` with positions/sets given in ``assignment``."""
    n = len(word)

    def go(f, a):
        if isinstance(f, Const):
            return f.value
        if isinstance(f, Rel):
            x, y = a[f.x], a[f.y]
            return {"<": x < y, "<=": x <= y, "=": x == y, "!=": x != y}[f.op]
        if isinstance(f, In):
            return a[f.x] in a[f.X]
        if isinstance(f, Letter):
            return word[a[f.x]] == f.sym
        if isinstance(f, Prod):
            x, y = a[f.x], a[f.y]
            m = morphism.target
            val = morphism(word[x + 1 : y + 1]) if y > x else m.identity
            return val == m.id_of(f.elem)
        if isinstance(f, Not):
            return not go(f.sub, a)
        if isinstance(f, And):
            return go(f.left, a) and go(f.right, a)
        if isinstance(f, Or):
            return go(f.left, a) or go(f.right, a)
        if isinstance(f, Implies):
            return (not go(f.left, a)) or go(f.right, a)
        if isinstance(f, Quant):
            if f.order == 1:
                dom = range(n)
            else:
                dom = (
                    frozenset(c)
                    for k in range(n + 1)
                    for c in itertools.combinations(range(n), k)
                )
            results = (go(f.body, {**a, f.var: v}) for v in dom)
            return any(results) if f.kind == "exists" else all(results)
        raise TypeError(f)

    return go(f, assignment)


# --- compiler ----------------------------------------------------------------


def track_alphabet(alphabet: Sequence[Hashable], k: int) -> list[tuple]:
    return [(s, bits) for s in alphabet for bits in itertools.product((0, 1), repeat=k)]


def encode(word: Sequence[Hashable], variables: Sequence[str], assignment: dict) -> list[tuple]:
    """Marked-track encoding of ``(word, assignment)``."""
    out = []
    for i, s in enumerate(word):
        bits = []
        for v in variables:
            val = assignment[v]
            bits.append(int(i == val) if isinstance(val, int) else int(i in val))
        out.append((s, tuple(bits)))
    return out


class Compiler:
    """Compiles formulas to minimal DFAs over ``alphabet x {0,1}^k``."""

    def __init__(self, alphabet: Sequence[Hashable], morphism: MonoidMorphism | None = None, cap: int | None = None):
        self.alphabet = tuple(alphabet)
        self.morphism = morphism
        self.cap = cap

    def compile(self, f: Formula, variables: Sequence[str], orders: dict[str, int] | None = None) -> fa.FiniteAutomaton:
        orders = dict(orders or {v: 1 for v in variables})
        check_formula(f, self.alphabet, {v: orders[v] for v in variables}, self.morphism)
        return self._go(f, tuple(variables), tuple(orders[v] for v in variables))

    @lru_cache(maxsize=None)  # noqa: B019 - compilers are short-lived
    def valid(self, orders: tuple[int, ...]) -> fa.FiniteAutomaton:
        fo = [k for k, o in enumerate(orders) if o == 1]
        alph = track_alphabet(self.alphabet, len(orders))

        def step(seen, sym):
            bits = sym[1]
            new = set(seen)
            for k in fo:
                if bits[k]:
                    if k in seen:
                        return None
                    new.add(k)
            return frozenset(new)

        return fa.minimize(fa.dfa_from_function(alph, frozenset(), step, lambda s: len(s) == len(fo)))

    def _go(self, f, vs, orders) -> fa.FiniteAutomaton:
        alph = track_alphabet(self.alphabet, len(vs))
        valid = self.valid(orders)
        if isinstance(f, Const):
            return valid if f.value else fa.empty_language(alph)
        if isinstance(f, Not):
            return fa.difference(valid, self._go(f.sub, vs, orders), self.cap)
        if isinstance(f, And):
            return fa.intersection(self._go(f.left, vs, orders), self._go(f.right, vs, orders), self.cap)
        if isinstance(f, Or):
            return fa.union(self._go(f.left, vs, orders), self._go(f.right, vs, orders), self.cap)
        if isinstance(f, Implies):
            return self._go(Or(Not(f.left), f.right), vs, orders)
        if isinstance(f, Quant):
            if f.kind == "forall":
                return self._go(Not(Quant("exists", f.order, f.var, Not(f.body))), vs, orders)
            inner_vs = vs + (f.var,)
            inner_orders = orders + (f.order,)
            if f.var in vs:
                # shadowing: the outer track is hidden inside the body
                fresh = f.var
                while fresh in vs:
                    fresh += "'"
                body = substitute(f.body, {f.var: fresh})
                inner_vs = vs + (fresh,)
            else:
                body = f.body
            inner = self._go(body, inner_vs, inner_orders)
            k = len(vs)
            return fa.minimize(fa.project(inner, lambda s: (s[0], s[1][:k]), alph))
        atom = self._atom(f, vs)
        return fa.intersection(atom, valid, self.cap)

    def _atom(self, f, vs) -> fa.FiniteAutomaton:
        alph = track_alphabet(self.alphabet, len(vs))
        idx = {v: k for k, v in enumerate(vs)}
        if isinstance(f, Rel):
            kx, ky = idx[f.x], idx[f.y]

            # state: tuple of events, each a frozenset of the names marked there
            def step(events, sym):
                marked = frozenset(n for n, k in (("x", kx), ("y", ky)) if sym[1][k])
                return events + (marked,) if marked else events

            def accept(events):
                where = {}
                for i, ev in enumerate(events):
                    for n in ev:
                        where.setdefault(n, i)
                if "x" not in where or "y" not in where:
                    return False
                x, y = where["x"], where["y"]
                return {"<": x < y, "<=": x <= y, "=": x == y, "!=": x != y}[f.op]

            def bounded_step(events, sym):
                ev = step(events, sym)
                return ev if len(ev) <= 2 else None

            return fa.dfa_from_function(alph, (), bounded_step, accept)
        if isinstance(f, In):
            kx, kX = idx[f.x], idx[f.X]
            return fa.dfa_from_function(
                alph,
                False,
                lambda ok, s: (True if s[1][kX] else None) if s[1][kx] else ok,
                lambda ok: ok,
            )
        if isinstance(f, Letter):
            kx = idx[f.x]
            return fa.dfa_from_function(
                alph,
                False,
                lambda ok, s: (True if s[0] == f.sym else None) if s[1][kx] else ok,
                lambda ok: ok,
            )
        if isinstance(f, Prod):
            mu = self.morphism
            m = mu.target
            kx, ky = idx[f.x], idx[f.y]
            target = m.id_of(f.elem)
            one = m.identity

            # phases: 0 nothing seen, 1 x seen (accumulating), 2 y seen first, 3 done
            def step(state, s):
                phase, val = state
                bx, by = s[1][kx], s[1][ky]
                img = mu.images[s[0]]
                if phase == 0:
                    if bx:
                        return (3, one) if by else (1, one)
                    return (2, one) if by else state
                if phase == 1:
                    val = m.mul(val, img)
                    return (3, val) if by else (1, val)
                if phase == 2:
                    return (3, one) if bx else state
                return state

            return fa.dfa_from_function(alph, (0, one), step, lambda st: st[0] == 3 and st[1] == target)
        raise TypeError(f)


def compile_formula(
    f: Formula | str,
    alphabet: Sequence[Hashable],
    free_vars: Sequence[str] | dict[str, int] = (),
    morphism: MonoidMorphism | None = None,
) -> fa.FiniteAutomaton:
    if isinstance(f, str):
        f = parse_formula(f)
    env = _as_env(free_vars)
    return Compiler(alphabet, morphism).compile(f, list(env), env)
