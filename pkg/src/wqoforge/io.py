"""JSON documents: loading, reference resolution and canonical output.

A monoid reference is an inline monoid document, a path to one, or
``builtin:NAME`` (a bundled data file or a catalog monoid).
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path

from . import catalog
from .graphs import LabelOrder
from .interpretation import CompiledInterpretation, Interpretation, load_interpretation
from .mlgraph import EdgeSelector
from .monoid import FiniteMonoid, MonoidMorphism, monoid_from_json
from .treemodel import GapTree, TreeModel


class DocumentError(ValueError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def digest(text: str | bytes) -> str:
    if isinstance(text, str):
        text = text.encode()
    return hashlib.sha256(text).hexdigest()


def builtin_names() -> list[str]:
    files = resources.files("wqoforge") / "data"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def read_text(ref: str) -> str:
    if ref.startswith("builtin:"):
        name = ref[len("builtin:") :]
        f = resources.files("wqoforge") / "data" / f"{name}.json"
        if not f.is_file():
            if name in catalog.NAMED:
                return canonical_json(catalog.named(name).to_json())
            raise DocumentError(f"no bundled document named {name!r}")
        return f.read_text()
    return Path(ref).read_text()


def load_document(ref: str) -> dict:
    try:
        return json.loads(read_text(ref))
    except json.JSONDecodeError as e:
        raise DocumentError(f"{ref}: invalid JSON ({e})") from e


def resolve_monoid(ref) -> FiniteMonoid:
    if isinstance(ref, FiniteMonoid):
        return ref
    if isinstance(ref, str):
        if ref.startswith("builtin:") and ref[len("builtin:") :] in catalog.NAMED:
            return catalog.named(ref[len("builtin:") :])
        return monoid_from_json(load_document(ref))
    if isinstance(ref, dict):
        return monoid_from_json(ref)
    raise DocumentError(f"cannot resolve monoid reference {ref!r}")


def load_pedge(m: FiniteMonoid, spec) -> EdgeSelector:
    if isinstance(spec, dict):
        if set(spec) != {"middle"}:
            raise DocumentError("selector objects support only the 'middle' key")
        return EdgeSelector.middle_in(m, spec["middle"])
    return EdgeSelector(m, [tuple(t) for t in spec])


def kind_of(doc: dict) -> str:
    if "edge" in doc and "alphabet" in doc:
        return "interpretation"
    if "components" in doc:
        return "forest"
    if "pedge" in doc:
        return "compiled"
    if "witness" in doc:
        return "witness"
    if "parents" in doc and "lambda" in doc:
        return "treemodel"
    if "parents" in doc and "edge_labels" in doc:
        return "gaptree"
    if "elements" in doc or "q" in doc:
        return "monoid"
    raise DocumentError("unrecognised document (expected an interpretation, monoid, selector, forest path or tree)")


def load_interp(doc: dict) -> Interpretation:
    if "monoid" in doc and "morphism" in doc:
        doc = dict(doc)
        doc["monoid"] = resolve_monoid(doc["monoid"]).to_json()
    return load_interpretation(doc)


def load_compiled(doc: dict) -> CompiledInterpretation:
    m = resolve_monoid(doc["monoid"])
    pedge = load_pedge(m, doc["pedge"])
    if "morphism" in doc:
        mu = MonoidMorphism(doc["alphabet"], m, doc["morphism"])
        return CompiledInterpretation(m, mu, pedge)
    return CompiledInterpretation.direct(m, pedge, doc.get("letters"))


def load_decidable(doc: dict):
    k = kind_of(doc)
    if k == "interpretation":
        return load_interp(doc)
    if k == "compiled":
        return load_compiled(doc)
    raise DocumentError(f"expected an interpretation or a compiled selector, got a {k} document")


def load_tree_model(doc: dict) -> TreeModel:
    return TreeModel(resolve_monoid(doc["monoid"]), doc["parents"], doc.get("mu", {}), doc.get("lambda", {}))


def load_gap_tree(doc: dict) -> GapTree:
    order = None
    if "edge_order" in doc:
        order = LabelOrder.chain(doc["edge_order"])

    def lab(x):
        return tuple(lab(y) for y in x) if isinstance(x, list) else x

    return GapTree(
        doc["parents"],
        {k: lab(v) for k, v in doc.get("vertex_labels", {}).items()} or {str(v): None for v in range(len(doc["parents"]))},
        doc.get("edge_labels", {}),
        LabelOrder.equality(),
        order,
    )
