"""Forest paths, their goodness via 2-SAT, and the automaton of bad ones.

A forest path is a sequence of blocks, each a word evaluating to the same
idempotent.  Goodness asks whether each block can send its middle letters
left or right so that the tripled word embeds; that choice is a 2-SAT
instance.
"""

import itertools

from wqoforge import catalog
from wqoforge.badness import badness_automaton
from wqoforge.decide import decide_bounded_bad_paths, render_word
from wqoforge.forestpath import (
    CutTables,
    ForestPath,
    cut_certificate,
    is_good_exhaustive,
    is_good_forest_path,
    words_by_value,
)
from wqoforge.mlgraph import EdgeSelector

m = catalog.mpath()
one = m.identity
pedge = EdgeSelector.middle_in(m, ["s"])

## Two blocks "ss ss" over Mpath are bad in the neutral context
p = ForestPath(m, pedge, [["s", "s"], ["s", "s"]])
g = is_good_forest_path(p, one, one)
print("encoding:", render_word(m, p.encode()))
print("good:", g.good, " unsatisfiable core:", g.core)
print("exhaustive agrees:", is_good_exhaustive(p, one, one) is None)

## The bad language and its bracket skeleton
bad = badness_automaton(m, pedge)
print("badness automaton states:", bad.automaton.n)
res = decide_bounded_bad_paths(m, pedge, badness=bad)
print(res.kind, "blocks at k = 1..4:", [res.components(k) for k in range(1, 5)])

## Over a totally ordered monoid, three or more blocks always have a cut certificate
t = catalog.min3()
byv = words_by_value(t, list(t.elements), 2)
for e in t.idempotents:
    tables = CutTables(t, e, byv[e])
    cert = tables.certified(3)
    print(f"idempotent {t.names[e]}: {len(byv[e])} words, certified triples {int(cert.sum())}/{cert.size}")

## A certificate is an assignment that works in every context
P = EdgeSelector(t, list(itertools.product(t.elements, repeat=3)))
q = ForestPath(t, P, [["1"], ["1"], ["1"]], t.id_of("1"))
print("certificate:", cut_certificate(q))
