"""From an MSO interpretation to a verdict, on the two classic classes.

Cliques are well-quasi-ordered with any number of labels; finite paths are
not, and the pipeline hands back a pump whose members are bad forest paths
and a family of labelled paths that is an antichain.

Run with ``python3 walkthroughs/01_cliques_and_paths.py``.
"""

from wqoforge.decide import antichain_from_bad_paths, decide_wqo, pairwise_incomparable, spaced_family
from wqoforge.forestpath import is_good_forest_path
from wqoforge.interpretation import compile_interpretation, eval_interpretation
from wqoforge.io import load_document, load_interp

## The interpretations are plain JSON documents with MSO formulas
cliques = load_interp(load_document("builtin:cliques"))
paths = load_interp(load_document("builtin:paths"))
print("cliques edge formula:", cliques.edge)
print("paths edge formula:  ", paths.edge)

## Evaluating on a word builds the graph directly
print(eval_interpretation(cliques, "aaaa").to_dot())
print("paths on 'abab':", eval_interpretation(paths, "abab").sorted_edges())

## Compilation: a finite monoid, a morphism from letters and an edge selector
ci = compile_interpretation(paths)
print("monoid elements:", ci.monoid.names)
print("J-classes:", [[ci.monoid.names[x] for x in c] for c in ci.monoid.j_classes])
print("selected triples:", len(ci.pedge.triples()))

## Cliques: the monoid is trivial and the verdict comes back at once
print(decide_wqo(compile_interpretation(cliques)))

## Paths: not WQO, with a pump
verdict = decide_wqo(ci)
report = verdict.to_json()
print("verdict:", report["verdict"], "in context", report["context"], "on idempotent", report["idempotent"])
print("pump:", report["pump"])
for text in report["witness_encodings"][:3]:
    print("  ", text)

## Every pumped member is a bad forest path, checked with 2-SAT
a, b = verdict.witness.context
for p in verdict.family(5):
    print(len(p.components), "blocks, good:", is_good_forest_path(p, a, b).good)

## Spread the members out and turn them into labelled graphs
family = spaced_family(verdict.witness, ci.monoid, ci.pedge, 4)
graphs = list(antichain_from_bad_paths(family, verdict.witness.context))
print("graph sizes:", [len(g) for g in graphs])
print("pairwise incomparable:", pairwise_incomparable(graphs))
