"""Totally ordered monoids and why they give WQO classes.

A monoid is totally ordered when its two-sided ideals form a chain.  The
four ideal-based characterisations agree on every small transformation
monoid; for totally ordered monoids bad forest paths have at most two
blocks, and the layered map sends a word to one product per J-level.
"""

import itertools
import random

from wqoforge import catalog
from wqoforge.decide import decide_wqo, totally_ordered_antichain
from wqoforge.interpretation import CompiledInterpretation
from wqoforge.mlgraph import EdgeSelector
from wqoforge.monoid import cancellation_witnesses, green_report, is_totally_ordered, total_order_criteria
from wqoforge.treemodel import layered

## Green's ideals of a small monoid
m = catalog.min3()
print(green_report(m).to_json(m))

## The four criteria on the named monoids
for name in ("U1", "min3", "SL2", "Mpath", "gap2"):
    mon = catalog.named(name)
    print(f"{name:6} size {mon.size:2}  totally ordered: {bool(is_totally_ordered(mon))!s:5}  {total_order_criteria(mon)}")

## A census of small transformation monoids
total = ordered = 0
for _, _, mon in catalog.small_transformation_monoids():
    total += 1
    ordered += bool(is_totally_ordered(mon))
print(f"{ordered} of {total} transformation monoids (<= 3 points, <= 2 generators) are totally ordered")

## Cancellation holds on totally ordered monoids
print("min3 cancellation violations:", cancellation_witnesses(m))

## Any edge selector over min3 gives a WQO class; the fast path skips automata
rng = random.Random(0)
pedge = EdgeSelector(m, [t for t in itertools.product(m.elements, repeat=3) if rng.random() < 0.5])
print(decide_wqo(CompiledInterpretation.direct(m, pedge)))

## The layered map: component a multiplies the letters J-above a
for word in (["2", "1", "3"], ["3", "3"], []):
    print(word, "->", [m.names[x] for x in layered(m, word)])

## Outside the totally ordered world: SL2 yields an antichain of even paths
sl2 = catalog.sl2()
gen = totally_ordered_antichain(sl2, "{x}", "{y}", endpoints=False)
print("SL2 antichain sizes:", [len(next(gen)) for _ in range(5)])
