"""JSON tree formats and loading of any artifact down to truth tables."""

from __future__ import annotations

import json
from pathlib import Path

from .boolfn import MAX_N, TruthTable, parse_truth_table
from .circuits import Circuit, parse_netlist, truth_tables
from .decomp import MonotoneDecomposition, parse_decomposition
from .models import (
    Leaf,
    MonotoneDecisionList,
    MonotoneDecisionTree,
    NonAdaptiveMDT,
    Node,
)
from .queries import QueryCodec, load_queries
from .stochastic import (
    HALF,
    Coin,
    M1Node,
    M2Node,
    NondetMDT_M1,
    NondetMDT_M2,
    QSet,
    QuerySetRMDT,
    RandomizedMDT,
    function_at_half,
    majority_eval,
    nmdt_table,
    wrmdt_accept_prob,
)

KINDS = ("mdl", "mdt", "namdt", "nmdt1", "nmdt2", "rmdt", "wrmdt", "mdt_list")


class FormatError(ValueError):
    pass


def _encode_node(node, codec: QueryCodec):
    if isinstance(node, Leaf):
        return {"leaf": node.label}
    if isinstance(node, Node):
        return {"q": codec.ref(node.query), "c0": _encode_node(node.child0, codec),
                "c1": _encode_node(node.child1, codec)}
    if isinstance(node, Coin):
        return {"coin": True, "c0": _encode_node(node.child0, codec),
                "c1": _encode_node(node.child1, codec)}
    if isinstance(node, QSet):
        return {"qset": [codec.ref(q) for q in node.queries],
                "c0": _encode_node(node.child0, codec), "c1": _encode_node(node.child1, codec)}
    if isinstance(node, M1Node):
        return {"edges": [[codec.ref(q), pol, _encode_node(c, codec)] for q, pol, c in node.edges]}
    if isinstance(node, M2Node):
        return {"q": codec.ref(node.query),
                "edges": [[lab, _encode_node(c, codec)] for lab, c in node.edges]}
    raise FormatError(f"cannot encode {node!r}")


def _decode_node(obj, qs, kind: str):
    if "leaf" in obj:
        return Leaf(int(obj["leaf"]))
    if kind == "nmdt1":
        return M1Node(tuple((qs[q], int(p), _decode_node(c, qs, kind)) for q, p, c in obj["edges"]))
    if kind == "nmdt2":
        return M2Node(qs[obj["q"]], tuple((int(l), _decode_node(c, qs, kind)) for l, c in obj["edges"]))
    c0, c1 = _decode_node(obj["c0"], qs, kind), _decode_node(obj["c1"], qs, kind)
    if obj.get("coin"):
        if kind != "rmdt":
            raise FormatError(f"coin node in a {kind} artifact")
        return Coin(c0, c1)
    if "qset" in obj:
        if kind != "wrmdt":
            raise FormatError(f"qset node in a {kind} artifact")
        return QSet(tuple(qs[i] for i in obj["qset"]), c0, c1)
    return Node(qs[obj["q"]], c0, c1)


def dump_model(model) -> dict:
    codec = QueryCodec()
    doc: dict = {"n": model[0].n if isinstance(model, list) and model else getattr(model, "n", None)}
    if isinstance(model, MonotoneDecisionList):
        doc["kind"] = "mdl"
        doc["nodes"] = [[codec.ref(q), c] for q, c in model.nodes]
    elif isinstance(model, MonotoneDecisionTree):
        doc["kind"] = "mdt"
        doc["root"] = _encode_node(model.root, codec)
    elif isinstance(model, NonAdaptiveMDT):
        doc["kind"] = "namdt"
        doc["levels"] = [codec.ref(q) for q in model.queries]
        doc["labels"] = format(model.leaf_labels, "x")
    elif isinstance(model, (NondetMDT_M1, NondetMDT_M2, RandomizedMDT)):
        doc["kind"] = {NondetMDT_M1: "nmdt1", NondetMDT_M2: "nmdt2", RandomizedMDT: "rmdt"}[type(model)]
        doc["root"] = _encode_node(model.root, codec)
    elif isinstance(model, QuerySetRMDT):
        doc["kind"] = "wrmdt"
        doc["w"] = model.w
        doc["root"] = _encode_node(model.root, codec)
    elif isinstance(model, list) and model and all(isinstance(t, MonotoneDecisionTree) for t in model):
        doc["kind"] = "mdt_list"
        doc["trees"] = [_encode_node(t.root, codec) for t in model]
    else:
        raise FormatError(f"cannot serialize {type(model).__name__}")
    doc.update(codec.dump())
    return doc


def dumps_model(model) -> str:
    return json.dumps(dump_model(model), indent=1) + "\n"


def load_model(doc: dict, max_n: int = MAX_N):
    try:
        kind, n = doc["kind"], int(doc["n"])
        if kind not in KINDS:
            raise FormatError(f"unknown model kind {kind!r}")
        if n > max_n:
            raise FormatError(f"n={n} exceeds max_n={max_n}")
        qs = load_queries(n, doc.get("queries", []), doc.get("circuits"))
        if kind == "mdl":
            return MonotoneDecisionList(n, tuple((qs[q], int(c)) for q, c in doc["nodes"]))
        if kind == "namdt":
            return NonAdaptiveMDT(n, tuple(qs[i] for i in doc["levels"]), int(doc["labels"], 16))
        if kind == "mdt_list":
            return [MonotoneDecisionTree(n, _decode_node(t, qs, "mdt")) for t in doc["trees"]]
        root = _decode_node(doc["root"], qs, kind)
    except (KeyError, IndexError, TypeError) as exc:
        raise FormatError(f"malformed model document: {exc!r}") from exc
    cls = {"mdt": MonotoneDecisionTree, "nmdt1": NondetMDT_M1, "nmdt2": NondetMDT_M2,
           "rmdt": RandomizedMDT}.get(kind)
    if cls is not None:
        return cls(n, root)
    return QuerySetRMDT(n, root, int(doc["w"]))


def loads_model(text: str, max_n: int = MAX_N):
    return load_model(json.loads(text), max_n)


# -- generic artifacts -----------------------------------------------------------


def parse_artifact(text: str, max_n: int = MAX_N):
    """Sniff the format: JSON model, decomposition, truth table or netlist."""
    head = text.lstrip()
    if head.startswith("{"):
        try:
            return loads_model(text, max_n)
        except json.JSONDecodeError as exc:
            raise FormatError(f"bad JSON: {exc}") from exc
    first = head.splitlines()[0] if head else ""
    if first.startswith("n=") and " m=" in first:
        return parse_decomposition(text, max_n)
    if first.startswith("n="):
        return parse_truth_table(text, max_n)
    c = parse_netlist(text)
    if c.n > max_n:
        raise FormatError(f"n={c.n} exceeds max_n={max_n}")
    return c


def read_artifact(path: str | Path, max_n: int = MAX_N):
    return parse_artifact(Path(path).read_text(), max_n)


def artifact_kind(obj) -> str:
    if isinstance(obj, TruthTable):
        return "table"
    if isinstance(obj, MonotoneDecomposition):
        return "decomposition"
    if isinstance(obj, Circuit):
        return "circuit"
    return dump_model(obj)["kind"] if not isinstance(obj, list) else "mdt_list"


def artifact_tables(obj, max_n: int = MAX_N) -> list[TruthTable]:
    """Reduce any artifact to its output truth table(s)."""
    if isinstance(obj, TruthTable):
        return [obj]
    if isinstance(obj, MonotoneDecomposition):
        return [obj.xor()]
    if isinstance(obj, Circuit):
        return truth_tables(obj, max_n)
    if isinstance(obj, (MonotoneDecisionList, MonotoneDecisionTree, NonAdaptiveMDT)):
        return [obj.truth_table()]
    if isinstance(obj, (NondetMDT_M1, NondetMDT_M2)):
        return [nmdt_table(obj)]
    if isinstance(obj, RandomizedMDT):
        return [function_at_half(obj)]
    if isinstance(obj, QuerySetRMDT):
        bits = sum(int(wrmdt_accept_prob(obj, x) >= HALF) << x for x in range(1 << obj.n))
        return [TruthTable(obj.n, bits)]
    if isinstance(obj, list):
        n = obj[0].n
        return [TruthTable(n, sum(majority_eval(obj, x) << x for x in range(1 << n)))]
    raise FormatError(f"cannot reduce {type(obj).__name__} to a truth table")


def serialize_artifact(obj) -> str:
    from .boolfn import format_truth_table
    from .circuits import emit_netlist
    from .decomp import format_decomposition

    if isinstance(obj, TruthTable):
        return format_truth_table(obj)
    if isinstance(obj, MonotoneDecomposition):
        return format_decomposition(obj)
    if isinstance(obj, Circuit):
        return emit_netlist(obj)
    return dumps_model(obj)


__all__ = [
    "FormatError",
    "artifact_kind",
    "artifact_tables",
    "dump_model",
    "dumps_model",
    "load_model",
    "loads_model",
    "parse_artifact",
    "read_artifact",
    "serialize_artifact",
]
