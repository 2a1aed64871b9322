"""2-SAT through strongly connected components of the implication graph."""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

# A literal is (var, value): "var is assigned value".


@dataclass(frozen=True)
class TwoSatResult:
    satisfiable: bool
    assignment: dict | None = None
    conflict_var: object = None
    # implication chains var=True -> ... -> var=False and back
    chain_to_false: tuple = ()
    chain_to_true: tuple = ()


def solve(variables, clauses) -> TwoSatResult:
    """Solve a conjunction of 2-clauses.

    ``clauses`` are pairs of literals ``((u, bu), (v, bv))`` meaning
    ``u == bu or v == bv``; a unit clause repeats its literal.
    """
    g = nx.DiGraph()
    for v in variables:
        g.add_node((v, True))
        g.add_node((v, False))
    for (u, bu), (v, bv) in clauses:
        g.add_edge((u, not bu), (v, bv))
        g.add_edge((v, not bv), (u, bu))
    comp = {}
    cond = nx.condensation(g)
    mapping = cond.graph["mapping"]
    for node, c in mapping.items():
        comp[node] = c
    for v in variables:
        if comp[(v, True)] == comp[(v, False)]:
            return TwoSatResult(
                False,
                conflict_var=v,
                chain_to_false=tuple(nx.shortest_path(g, (v, True), (v, False))),
                chain_to_true=tuple(nx.shortest_path(g, (v, False), (v, True))),
            )
    order = {c: i for i, c in enumerate(nx.topological_sort(cond))}
    # a literal is true when its component comes later than its negation's
    assignment = {v: order[comp[(v, True)]] > order[comp[(v, False)]] for v in variables}
    return TwoSatResult(True, assignment=assignment)


def check(assignment: dict, clauses) -> bool:
    return all(assignment[u] == bu or assignment[v] == bv for (u, bu), (v, bv) in clauses)
