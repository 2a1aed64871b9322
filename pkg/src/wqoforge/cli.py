"""Command-line interface: ``wqo-forge <command> ...``.

Every command prints one canonical JSON document (sorted keys) on stdout;
diagnostics and timings go to stderr.  Exit codes: 0 success (and WQO),
10 not WQO, 2 error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from . import __version__
from .automata import ResourceCapExceeded
from .decide import (
    NotWQO,
    antichain_from_bad_paths,
    decide_wqo,
    spaced_family,
    totally_ordered_antichain,
)
from .forestpath import ForestPath, is_good_forest_path
from .interpretation import compile_interpretation, eval_interpretation
from .io import (
    DocumentError,
    canonical_json,
    digest,
    kind_of,
    load_decidable,
    load_document,
    load_gap_tree,
    load_interp,
    load_pedge,
    load_tree_model,
    read_text,
    resolve_monoid,
)
from .mlgraph import expr_to_json, simon_forest
from .monoid import MonoidError, cancellation_witnesses, green_report, is_totally_ordered, total_order_criteria
from .treemodel import TreeError, gap_embedding, mtogap, tm_embedding, tmeval

EXIT_OK, EXIT_NOT_WQO, EXIT_ERROR = 0, 10, 2

log = logging.getLogger("wqoforge")


class CliError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("WQO_FORGE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise CliError(f"WQO_FORGE_THREADS must be an integer, got {raw!r}")


def _split_word(text: str, names) -> list[str]:
    """Space or comma separated tokens; a bare string is split into
    characters when every name is a single character."""
    if any(c in text for c in " ,"):
        return [t for t in text.replace(",", " ").split() if t]
    if all(len(n) == 1 for n in names):
        return list(text)
    return [text]


def _names_pair(m, pair):
    return [m.names[pair[0]], m.names[pair[1]]]


# --- commands -------------------------------------------------------------------------------


def cmd_monoid_check(args):
    m = resolve_monoid(args.file)
    verdict = is_totally_ordered(m)
    rep = green_report(m).to_json(m)
    return {
        "size": m.size,
        "identity": m.names[m.identity],
        "idempotents": [m.names[e] for e in m.idempotents],
        "green": rep,
        "criteria": total_order_criteria(m),
        "totally_ordered": verdict.totally_ordered,
        "witness": None if verdict.witness is None else _names_pair(m, verdict.witness),
        "cancellation_violations": [[side] + [m.names[x] for x in t] for side, *t in cancellation_witnesses(m)],
    }, EXIT_OK


def cmd_interp_compile(args):
    ci = compile_interpretation(load_interp(load_document(args.file)))
    out = ci.to_json()
    out["letters"] = [ci.monoid.names[x] for x in ci.letters]
    out["totally_ordered"] = is_totally_ordered(ci.monoid).totally_ordered
    return out, EXIT_OK


def cmd_interp_eval(args):
    interp = load_interp(load_document(args.file))
    word = _split_word(args.word, [str(s) for s in interp.alphabet])
    g = eval_interpretation(interp, word)
    if args.dot:
        return g.to_dot("G", lambda x: ""), EXIT_OK
    out = g.to_json()
    out.pop("labels")
    out["word"] = word
    return out, EXIT_OK


def cmd_decide_wqo(args):
    src = load_decidable(load_document(args.file))
    v = decide_wqo(src, cap=args.cap)
    out = v.to_json()
    if isinstance(v, NotWQO):
        out["witness_checks"] = [
            {"encoding": e, "bad_in_context": not is_good_forest_path(p, *v.witness.context).good}
            for e, p in zip(out["witness_encodings"], v.family(5))
        ]
        log.info("labels: %d for the antichain construction, %d in the sharper count", v.k, v.k_main_proof)
        return out, EXIT_NOT_WQO
    return out, EXIT_OK


def cmd_forest_check(args):
    doc = load_document(args.file)
    m = resolve_monoid(doc["monoid"])
    pedge = load_pedge(m, doc["pedge"])
    path = ForestPath(m, pedge, doc["components"], doc.get("idempotent"))
    rows = []
    first_bad = None
    for a in m.elements:
        for b in m.elements:
            g = is_good_forest_path(path, a, b)
            row = {"context": _names_pair(m, (a, b)), "good": g.good}
            if g.good:
                row["right_copy"] = sorted(f"{i}.{p}" for (i, p), bit in g.assignment.items() if bit)
            elif first_bad is None:
                first_bad = row["context"]
            rows.append(row)
    return {"path": path.to_json(), "contexts": rows, "bad": first_bad is not None, "first_bad_context": first_bad}, EXIT_OK


def _graph_json(g, m=None):
    def fmt(lab):
        if m is not None and isinstance(lab, tuple) and len(lab) == 2 and isinstance(lab[0], tuple):
            (l, r), tag = lab
            return [m.names[l], m.names[r], tag]
        return lab

    return g.to_json(fmt)


def cmd_antichain(args):
    doc = load_document(args.file)
    if kind_of(doc) == "witness":
        m = resolve_monoid(doc["monoid"])
        a, b = doc["witness"]
        gen = totally_ordered_antichain(m, a, b)
        graphs = [next(gen) for _ in range(args.count)]
        source = {"construction": "totally-ordered witness", "witness": [a, b]}
        fmt_m = None
    else:
        v = decide_wqo(load_decidable(doc), cap=args.cap)
        if not isinstance(v, NotWQO):
            return {"verdict": v.kind, "graphs": [], "note": "no bad-path family: the class is labelled-WQO"}, EXIT_OK
        fam = spaced_family(v.witness, m, v.pedge, args.count)
        graphs = list(antichain_from_bad_paths(fam, v.witness.context))
        source = {"construction": "bad forest paths", "context": _names_pair(m, v.witness.context), "blocks": [len(p) for p in fam]}
        fmt_m = m
    if args.dot:
        return "".join(g.to_dot(f"G{i}", lambda x: str(x)) for i, g in enumerate(graphs)), EXIT_OK
    return {"source": source, "graphs": [_graph_json(g, fmt_m) for g in graphs]}, EXIT_OK


def cmd_factorize(args):
    m = resolve_monoid(args.monoid)
    word = _split_word(args.word, m.names)
    expr = simon_forest(m, None, [m.id_of(x) for x in word])
    if expr is None:
        return {"word": [], "expr": None, "height": 0, "bound": 3 * m.size}, EXIT_OK
    return {"word": word, "expr": expr_to_json(m, expr), "height": expr.depth, "value": m.names[expr.value], "bound": 3 * m.size}, EXIT_OK


def cmd_tree(args):
    if args.action == "eval":
        t = load_tree_model(load_document(args.files[0]))
        g = tmeval(t)
        if args.dot:
            return g.to_dot("T", lambda x: ""), EXIT_OK
        out = g.to_json()
        out.pop("labels")
        return out, EXIT_OK
    if args.action == "mtogap":
        t = load_tree_model(load_document(args.files[0]))
        g = mtogap(t)
        nm = t.monoid.names
        return {
            "parents": [-1 if p is None else p for p in g.parents],
            "edge_labels": {str(v): nm[x] for v, x in sorted(g.edge_labels.items())},
            "vertex_labels": {
                str(v): {
                    "mu": None if mu is None else sorted([nm[a], nm[b]] for a, b in mu),
                    "layered": {nm[a]: nm[x] for a, x in zip(t.monoid.elements, lay)},
                }
                for v, (mu, lay) in sorted(g.vertex_labels.items())
            },
        }, EXIT_OK
    if len(args.files) != 2:
        raise CliError(f"tree {args.action} takes two files")
    d1, d2 = (load_document(f) for f in args.files)
    if args.action == "embed":
        t1, t2 = load_tree_model(d1), load_tree_model(d2)
        h = tm_embedding(t1, t2)
        return {"embeds": h is not None, "map": None if h is None else {str(k): v for k, v in sorted(h.items())}}, EXIT_OK
    # gap: tree models go through mtogap, gap trees are used as they are
    s = mtogap(load_tree_model(d1)) if kind_of(d1) == "treemodel" else load_gap_tree(d1)
    t = mtogap(load_tree_model(d2)) if kind_of(d2) == "treemodel" else load_gap_tree(d2)
    h = gap_embedding(s, t)
    return {"embeds": h is not None, "map": None if h is None else {str(k): v for k, v in sorted(h.items())}}, EXIT_OK


# --- parser ----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomised steps (recorded in the report)")
    common.add_argument("--cap", type=int, default=200_000, help="state cap for automaton constructions")
    common.add_argument("-v", "--verbose", action="store_true", help="diagnostics on stderr")

    p = argparse.ArgumentParser(prog="wqo-forge", description="Decide labelled well-quasi-ordering of MSO-interpretable graph classes.")
    p.add_argument("--version", action="version", version=f"wqo-forge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    mon = sub.add_parser("monoid", help="monoid utilities").add_subparsers(dest="action", required=True)
    c = mon.add_parser("check", parents=[common], help="Green ideals, total order test, cancellation")
    c.add_argument("file")
    c.set_defaults(func=cmd_monoid_check)

    it = sub.add_parser("interp", help="MSO interpretations").add_subparsers(dest="action", required=True)
    c = it.add_parser("compile", parents=[common], help="monoid, morphism and edge selector")
    c.add_argument("file")
    c.set_defaults(func=cmd_interp_compile)
    c = it.add_parser("eval", parents=[common], help="graph of a word")
    c.add_argument("file")
    c.add_argument("word")
    c.add_argument("--dot", action="store_true")
    c.set_defaults(func=cmd_interp_eval)

    de = sub.add_parser("decide", help="decision procedures").add_subparsers(dest="action", required=True)
    c = de.add_parser("wqo", parents=[common], help="labelled-WQO verdict (exit 0 WQO, 10 not WQO)")
    c.add_argument("file")
    c.set_defaults(func=cmd_decide_wqo)

    fo = sub.add_parser("forest", help="forest paths").add_subparsers(dest="action", required=True)
    c = fo.add_parser("check", parents=[common], help="goodness in every context")
    c.add_argument("file")
    c.set_defaults(func=cmd_forest_check)

    c = sub.add_parser("antichain", parents=[common], help="antichain members")
    c.add_argument("file")
    c.add_argument("--count", type=int, default=6)
    c.add_argument("--dot", action="store_true")
    c.set_defaults(func=cmd_antichain)

    c = sub.add_parser("factorize", parents=[common], help="Simon factorisation forest of a word")
    c.add_argument("monoid")
    c.add_argument("word")
    c.set_defaults(func=cmd_factorize)

    c = sub.add_parser("tree", parents=[common], help="tree models and gap embeddings")
    c.add_argument("action", choices=["eval", "embed", "gap", "mtogap"])
    c.add_argument("files", nargs="+")
    c.add_argument("--dot", action="store_true")
    c.set_defaults(func=cmd_tree)
    return p


def _inputs(args) -> list[str]:
    refs = []
    for name in ("file", "monoid"):
        if hasattr(args, name):
            refs.append(getattr(args, name))
    refs += getattr(args, "files", [])
    return refs


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    handler = logging.StreamHandler(stderr)
    handler.setFormatter(logging.Formatter("wqo-forge: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    t0 = time.perf_counter()
    try:
        threads = _threads()
        log.info("WQO_FORGE_THREADS=%d (advisory; contexts are processed in order)", threads)
        digests = {ref: digest(read_text(ref)) for ref in _inputs(args)}
        result, code = args.func(args)
    except (DocumentError, MonoidError, TreeError, CliError, ResourceCapExceeded, ValueError, KeyError, OSError) as e:
        msg = str(e.args[0]) if isinstance(e, KeyError) and e.args else str(e)
        err = {"error": type(e).__name__, "message": msg}
        if isinstance(e, ResourceCapExceeded):
            err["states"] = e.states
            err["cap"] = e.cap
        stdout.write(canonical_json(err))
        print(f"wqo-forge: error: {err['message']}", file=stderr)
        return EXIT_ERROR
    if isinstance(result, str):
        stdout.write(result)
    else:
        report = {
            "command": [args.command] + ([args.action] if hasattr(args, "action") and args.command != "tree" else []),
            "inputs": digests,
            "seed": args.seed,
            "result": result,
        }
        if args.command == "tree":
            report["command"].append(args.action)
        stdout.write(canonical_json(report))
    print(f"wqo-forge: {time.perf_counter() - t0:.3f}s", file=stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
