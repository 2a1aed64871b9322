"""Acceptance criteria 1-10.

Each ``check_*`` function returns ``(ok, detail)``.  The pytest wrappers
assert on the result, and the terminal summary (see ``conftest.py``)
prints one PASS/FAIL line per criterion.  Running this file directly
prints the same lines without pytest.
"""

from __future__ import annotations

import itertools
import random
import time

import networkx as nx
import numpy as np
from networkx.algorithms import isomorphism as iso

from wqoforge import catalog
from wqoforge.badness import badness_automaton
from wqoforge.decide import (
    LabelledWQO,
    NotWQO,
    antichain_from_bad_paths,
    decide_wqo,
    pairwise_incomparable,
    spaced_family,
    totally_ordered_antichain,
)
from wqoforge.forestpath import (
    CLOSE,
    OPEN,
    CutTables,
    ForestPath,
    cut_certificate,
    is_bad_forest_path,
    is_good_exhaustive,
    is_good_forest_path,
    tripled_embedding_holds,
    words_by_value,
)
from wqoforge.graphs import path_graph
from wqoforge.interpretation import compile_interpretation, eval_interpretation
from wqoforge.io import load_compiled, load_document, load_interp
from wqoforge.mlgraph import EdgeSelector, downcast, evaluate, flatten, simon_forest, validate
from wqoforge.monoid import dali_leq, is_totally_ordered, total_order_criteria, cancellation_witnesses
from wqoforge.treemodel import gap_embedding, grow_tree_model, layered, mtogap, random_tree_model, tm_embedding

RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> bool:
    RESULTS[n] = (ok, detail)
    return ok


def line(n: int) -> str:
    ok, detail = RESULTS[n]
    return f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"


# --- independent oracles -------------------------------------------------------------------


def ideals_by_brute_force(m):
    """J(x) = M x M, R(x) = x M, computed from the table alone."""
    els = list(m.elements)
    R = [frozenset(m.mul(x, s) for s in els) for x in els]
    J = [frozenset(m.mul(m.mul(s, x), t) for s in els for t in els) for x in els]
    return R, J


def nx_graph(g):
    h = nx.Graph()
    for v in g.vertices:
        h.add_node(v, label=g.labels[v])
    h.add_edges_from(g.edges)
    return h


def nx_embeds(g, h) -> bool:
    """Induced labelled subgraph test via VF2 (equality on labels)."""
    if len(g) > len(h):
        return False
    gm = iso.GraphMatcher(nx_graph(h), nx_graph(g), node_match=lambda a, b: a["label"] == b["label"])
    return gm.subgraph_is_isomorphic()


def corpus():
    """(name, monoid) for criterion 2: all small transformation monoids plus the named ones."""
    for q, gens, m in catalog.small_transformation_monoids(3, 2):
        yield f"T{q}{list(gens)}", m
    for name in ("U1", "min3", "SL2", "Mpath"):
        yield name, catalog.named(name)


# --- 1 ----------------------------------------------------------------------------------------


def check_1():
    t0 = time.perf_counter()
    cl = decide_wqo(load_interp(load_document("builtin:cliques")))
    t_cl = time.perf_counter() - t0
    t0 = time.perf_counter()
    pa = decide_wqo(load_interp(load_document("builtin:paths")))
    t_pa = time.perf_counter() - t0
    ok = isinstance(cl, LabelledWQO) and isinstance(pa, NotWQO) and t_cl <= 60 and t_pa <= 60
    confirmed = 0
    if isinstance(pa, NotWQO):
        a, b = pa.witness.context
        for p in pa.family(5):
            g = is_good_forest_path(p, a, b)
            # the exhaustive enumeration is an independent second opinion on small members
            ex = is_good_exhaustive(p, a, b) if p.n_vertices() <= 14 else None
            if not g.good and ex is None and is_bad_forest_path(p) is not None:
                confirmed += 1
        ok = ok and confirmed == 5
    return record(1, ok, f"cliques={type(cl).__name__} ({t_cl:.1f}s), paths={type(pa).__name__} ({t_pa:.1f}s), bad members confirmed {confirmed}/5")


# --- 2 ----------------------------------------------------------------------------------------


def check_2():
    t0 = time.perf_counter()
    n = dis = total = 0
    for name, m in corpus():
        n += 1
        R, J = ideals_by_brute_force(m)
        definition = all(J[m.mul(a, b)] in (J[a], J[b]) for a in m.elements for b in m.elements)
        verdicts = dict(total_order_criteria(m), definition=definition)
        funcs = getattr(m, "functions", None)
        if funcs is not None:
            verdicts["dali"] = all(dali_leq(f, g) or dali_leq(g, f) for f in funcs for g in funcs)
        try:
            verdicts["library"] = bool(is_totally_ordered(m))
        except AssertionError:
            verdicts["library"] = None
        if len(set(verdicts.values())) != 1:
            dis += 1
        total += definition
    dt = time.perf_counter() - t0
    return record(2, dis == 0 and dt <= 60, f"{n} monoids ({total} totally ordered), disagreements {dis}, {dt:.1f}s")


# --- 3 ----------------------------------------------------------------------------------------


def random_selector(m, rng, density=0.5):
    return EdgeSelector(m, [t for t in itertools.product(m.elements, repeat=3) if rng.random() < density])


def check_3(selectors=20, samples=40, seed=3):
    """Every path with 3 or 4 components is covered by a cut certificate
    (checked on the full tuple space); certificates are re-verified on
    samples against the tripled-embedding oracle and the 2-SAT checker,
    and any uncovered path would be decided by the 2-SAT checker."""
    t0 = time.perf_counter()
    rng = random.Random(seed)
    long_bad = uncovered = sample_fail = checked = 0
    for m in (catalog.min3(), catalog.gap_to_tm_monoid(2)):
        byv = words_by_value(m, list(m.elements), 3)
        sels = [random_selector(m, rng) for _ in range(selectors)]
        for e in m.idempotents:
            ws = byv.get(e, [])
            if not ws:
                continue
            tables = CutTables(m, e, ws)
            for n in (3, 4):
                cert = tables.certified(n)
                for idx in zip(*np.nonzero(~cert)):
                    uncovered += 1
                    comps = [ws[i] for i in idx]
                    for P in sels:
                        if is_bad_forest_path(ForestPath(m, P, comps, e)) is not None:
                            long_bad += 1
                for P in sels:
                    for _ in range(samples):
                        idx = tuple(rng.randrange(len(ws)) for _ in range(n))
                        p = ForestPath(m, P, [ws[i] for i in idx], e)
                        checked += 1
                        c = cut_certificate(p)
                        if (c is not None) != bool(cert[idx]):
                            sample_fail += 1
                            continue
                        for a, b in itertools.product(m.elements, repeat=2):
                            if c is not None and not tripled_embedding_holds(p, a, b, c):
                                sample_fail += 1
                            if not is_good_forest_path(p, a, b).good:
                                long_bad += 1
    dt = time.perf_counter() - t0
    ok = long_bad == 0 and sample_fail == 0 and dt <= 300
    return record(3, ok, f"bad paths with >2 components: {long_bad}; uncertified tuples {uncovered}; sampled {checked} (failures {sample_fail}); {dt:.1f}s")


# --- 4 ----------------------------------------------------------------------------------------


def well_formed_words(m, letters, max_len):
    """All encodings ``<e w1 >e <e w2 >e ...`` of length <= max_len, built
    from words grouped by value (independent of the library automaton)."""
    byv = words_by_value(m, list(letters), max_len - 2)
    out = []
    for e in m.idempotents:
        blocks = [((OPEN, e),) + w + ((CLOSE, e),) for w in byv.get(e, [])]

        def extend(prefix):
            for blk in blocks:
                if len(prefix) + len(blk) <= max_len:
                    out.append(prefix + blk)
                    extend(prefix + blk)

        extend(())
    return out


def example_selectors():
    u1, mp = catalog.u1(), catalog.mpath()
    return [
        ("U1 middle 0", u1, EdgeSelector.middle_in(u1, ["0"])),
        ("U1 middle 1", u1, EdgeSelector.middle_in(u1, ["1"])),
        ("U1 ends differ", u1, EdgeSelector.from_predicate(u1, lambda p, x, s: (p == 0) != (s == 0))),
        ("Mpath middle s", mp, EdgeSelector.middle_in(mp, ["s"])),
        ("Mpath middle z", mp, EdgeSelector.middle_in(mp, ["z"])),
    ]


def check_4():
    t0 = time.perf_counter()
    words = dis = bad = 0
    for _, m, P in example_selectors():
        B = badness_automaton(m, P)
        for w in well_formed_words(m, B.letters, 8):
            words += 1
            o = is_bad_forest_path(ForestPath.decode(m, P, w)) is not None
            bad += o
            dis += o != B.accepts(w)
    dt = time.perf_counter() - t0
    return record(4, dis == 0 and words > 0, f"{words} encodings ({bad} bad), disagreements {dis}, {dt:.1f}s")


# --- 5 ----------------------------------------------------------------------------------------


def check_5(count=1000, seed=5):
    rng = random.Random(seed)
    fails = 0
    worst = {}
    for name, m in (("Mpath", catalog.mpath()), ("min3", catalog.min3())):
        h = 0
        for _ in range(count):
            w = [rng.choice(m.elements) for _ in range(rng.randint(1, 50))]
            f = simon_forest(m, None, w)
            h = max(h, f.depth)
            if f.depth > 3 * m.size or not validate(m, f) or flatten(f) != w or evaluate(m, f) != m.product(w):
                fails += 1
        worst[name] = h
    return record(5, fails == 0, f"{2 * count} words, failures {fails}, max heights {worst} (bound 3|M| = 9)")


# --- 6 ----------------------------------------------------------------------------------------


def check_6(count=500, seed=6):
    rng = random.Random(seed)
    viol = pos = 0
    for m in (catalog.min3(), catalog.gap_to_tm_monoid(2)):
        for _ in range(count):
            n1 = rng.randint(1, 5)
            t1 = random_tree_model(m, n1, rng)
            if rng.random() < 0.7:
                t2 = grow_tree_model(t1, rng, rng.randint(0, 8 - n1))
            else:
                t2 = random_tree_model(m, rng.randint(1, 8), rng)
            assert t1.n <= 8 and t2.n <= 8
            if gap_embedding(mtogap(t1), mtogap(t2)) is not None:
                pos += 1
                viol += tm_embedding(t1, t2) is None
    return record(6, viol == 0 and pos > 0, f"{2 * count} pairs, gap embeddings {pos}, violations {viol}")


# --- 7 ----------------------------------------------------------------------------------------


def check_7():
    m = catalog.sl2()
    gen = totally_ordered_antichain(m, "{x}", "{y}", endpoints=True)
    graphs = [next(gen) for _ in range(8)]
    paths_ok = all(
        graphs[n].same_as(path_graph(2 * (n + 1)), labels=False) and nx.is_isomorphic(nx_graph(graphs[n]), nx.path_graph(2 * (n + 1)))
        for n in range(5)
    )
    sl2_ok = pairwise_incomparable(graphs) and not any(nx_embeds(g, h) for g, h in itertools.permutations(graphs, 2))

    mp = load_compiled(load_document("builtin:mpath_paths"))
    v = decide_wqo(mp)
    mp_ok = False
    sizes = []
    if isinstance(v, NotWQO):
        fam = spaced_family(v.witness, v.monoid, v.pedge, 6)
        gs = list(antichain_from_bad_paths(fam, v.witness.context))
        sizes = [len(g) for g in gs]
        mp_ok = len(gs) == 6 and pairwise_incomparable(gs) and not any(nx_embeds(g, h) for g, h in itertools.permutations(gs, 2))
    ok = paths_ok and sl2_ok and mp_ok
    return record(7, ok, f"SL2 induced paths n<=4: {paths_ok}, SL2 first 8 incomparable: {sl2_ok}, Mpath 6 graphs {sizes} incomparable: {mp_ok}")


# --- 8 ----------------------------------------------------------------------------------------


def random_forest_path(rng, max_vertices=12):
    m = rng.choice([catalog.u1(), catalog.min3(), catalog.mpath(), catalog.sl2(), catalog.gap_to_tm_monoid(2), catalog.cyclic(2)])
    P = random_selector(m, rng, rng.choice([0.2, 0.5, 0.8]))
    byv = words_by_value(m, list(m.elements), 3)
    e = rng.choice([x for x in m.idempotents if x in byv])
    comps, size = [], 0
    for _ in range(rng.randint(1, 6)):
        w = rng.choice(byv[e])
        if size + len(w) > max_vertices:
            break
        comps.append(w)
        size += len(w)
    if not comps:
        comps = [min(byv[e], key=len)]
    return ForestPath(m, P, comps, e)


def check_8(count=200, seed=8):
    rng = random.Random(seed)
    dis = contexts = 0
    for _ in range(count):
        p = random_forest_path(rng)
        assert p.n_vertices() <= 12
        for a, b in itertools.product(p.monoid.elements, repeat=2):
            contexts += 1
            g = is_good_forest_path(p, a, b)
            ex = is_good_exhaustive(p, a, b)
            if g.good != (ex is not None):
                dis += 1
            elif g.good and not tripled_embedding_holds(p, a, b, g.assignment):
                dis += 1
    return record(8, dis == 0, f"{count} paths, {contexts} contexts, disagreements {dis}")


# --- 9 ----------------------------------------------------------------------------------------


def check_9(max_len=6):
    dis = words = 0
    for name in ("cliques", "paths"):
        interp = load_interp(load_document(f"builtin:{name}"))
        ci = compile_interpretation(interp)
        for n in range(max_len + 1):
            for w in itertools.product(interp.alphabet, repeat=n):
                words += 1
                g = eval_interpretation(interp, w)
                oracle = eval_interpretation(interp, w, method="oracle")
                h = downcast(ci.word_graph(w))
                if not (g.same_as(h, labels=False) and oracle.same_as(h, labels=False)):
                    dis += 1
    return record(9, dis == 0, f"{words} words over both interpretations, mismatches {dis}")


# --- 10 ---------------------------------------------------------------------------------------


def check_10(count=500, seed=10):
    rng = random.Random(seed)
    canc = jr = stab = mons = 0
    for _, m in corpus():
        R, J = ideals_by_brute_force(m)
        mul = m.mul
        for x, y in itertools.product(m.elements, repeat=2):
            if J[mul(x, y)] == J[x] and not R[x] <= R[mul(x, y)]:
                jr += 1
        to = all(J[mul(a, b)] in (J[a], J[b]) for a in m.elements for b in m.elements)
        if not to:
            continue
        mons += 1
        canc += len(cancellation_witnesses(m))
        for a, b, c in itertools.product(m.elements, repeat=3):
            if J[a] <= J[b] and J[a] <= J[c] and not J[a] <= J[mul(b, c)]:
                stab += 1
    lay = 0
    for m in (catalog.min3(), catalog.min_monoid(2), catalog.u1(), catalog.gap_to_tm_monoid(2)):
        R, J = ideals_by_brute_force(m)
        for _ in range(count):
            u = [rng.choice(m.elements) for _ in range(rng.randint(0, 12))]
            v = [rng.choice(m.elements) for _ in range(rng.randint(0, 12))]
            lu, lv, luv = layered(m, u), layered(m, v), layered(m, u + v)
            for a in m.elements:
                direct = m.product([x for x in u + v if J[a] <= J[x]])
                if luv[a] != m.mul(lu[a], lv[a]) or luv[a] != direct or not J[a] <= J[luv[a]]:
                    lay += 1
    ok = canc == jr == stab == lay == 0
    return record(10, ok, f"{mons} totally ordered monoids: cancellation violations {canc}, stability {stab}; J->R violations {jr}; layered violations {lay} over {4 * count} word pairs")


CHECKS = {1: check_1, 2: check_2, 3: check_3, 4: check_4, 5: check_5, 6: check_6, 7: check_7, 8: check_8, 9: check_9, 10: check_10}


def test_criterion_01_decide_wqo():
    assert check_1(), line(1)


def test_criterion_02_total_order_equivalence():
    assert check_2(), line(2)


def test_criterion_03_bad_paths_totally_ordered():
    assert check_3(), line(3)


def test_criterion_04_automaton_oracle():
    assert check_4(), line(4)


def test_criterion_05_simon_forests():
    assert check_5(), line(5)


def test_criterion_06_gap_reflection():
    assert check_6(), line(6)


def test_criterion_07_antichains():
    assert check_7(), line(7)


def test_criterion_08_two_sat():
    assert check_8(), line(8)


def test_criterion_09_mso_round_trip():
    assert check_9(), line(9)


def test_criterion_10_algebraic_properties():
    assert check_10(), line(10)


if __name__ == "__main__":
    for n, fn in CHECKS.items():
        try:
            fn()
        except Exception as exc:  # report and keep going
            record(n, False, f"raised {type(exc).__name__}: {exc}")
        print(line(n), flush=True)
