"""JSON (de)serialisation of graphs and instances, and DOT export.

Costs and shares travel as exact fraction strings such as "7/2", never as
floats. Every document carries a ``schema_version`` field.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping

from .errors import InvalidInstance
from .graph import Edge, Graph, Instance, natural_key

SCHEMA_VERSION = 1


def fraction_str(x) -> str:
    return str(Fraction(x))


def parse_fraction(value, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise InvalidInstance(f"{where}: expected an exact 'p/q' string, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise InvalidInstance(f"{where}: expected an exact 'p/q' string, got {value!r}")
    try:
        return Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidInstance(f"{where}: cannot parse {value!r} as a fraction") from None


# -- to JSON ----------------------------------------------------------------------


def graph_to_json(g: Graph) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "u": e.u, "v": e.v} for e in g.edges],
    }


def instance_to_json(inst: Instance) -> dict:
    (s1, t1), (s2, t2) = inst.terminals
    doc = graph_to_json(inst.graph)
    for e in doc["edges"]:
        e["cost"] = fraction_str(inst.cost[e["id"]])
    doc["terminals"] = {"s1": s1, "t1": t1, "s2": s2, "t2": t2}
    return doc


def dumps(doc) -> str:
    """Deterministic JSON text (sorted keys, two-space indent, trailing newline)."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- from JSON --------------------------------------------------------------------


def _require(doc: Mapping, key: str, kind, where: str):
    if key not in doc:
        raise InvalidInstance(f"{where}: missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise InvalidInstance(f"{where}.{key}: wrong type {type(value).__name__}")
    return value


def graph_from_json(doc) -> Graph:
    if not isinstance(doc, dict):
        raise InvalidInstance("document: expected a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InvalidInstance(f"schema_version: unsupported value {version!r}")
    vertices = _require(doc, "vertices", list, "document")
    edges_doc = _require(doc, "edges", list, "document")
    for k, v in enumerate(vertices):
        if not isinstance(v, (str, int)) or isinstance(v, bool):
            raise InvalidInstance(f"vertices[{k}]: vertex ids must be strings or integers")
    edges = []
    for k, e in enumerate(edges_doc):
        where = f"edges[{k}]"
        if not isinstance(e, dict):
            raise InvalidInstance(f"{where}: expected an object")
        for key in ("id", "u", "v"):
            if key not in e:
                raise InvalidInstance(f"{where}: missing field {key!r}")
        edges.append(Edge(e["id"], e["u"], e["v"]))
    known = set(vertices)
    for k, e in enumerate(edges):
        for end in (e.u, e.v):
            if end not in known:
                raise InvalidInstance(f"edges[{k}]: endpoint {end!r} is not a listed vertex")
    try:
        return Graph(vertices, edges)
    except ValueError as exc:
        raise InvalidInstance(f"edges: {exc}") from None


def instance_from_json(doc) -> Instance:
    g = graph_from_json(doc)
    terms = _require(doc, "terminals", dict, "document")
    for key in ("s1", "t1", "s2", "t2"):
        if key not in terms:
            raise InvalidInstance(f"terminals: missing field {key!r}")
    cost = {}
    for k, e in enumerate(doc["edges"]):
        if "cost" not in e:
            raise InvalidInstance(f"edges[{k}]: missing field 'cost'")
        cost[e["id"]] = parse_fraction(e["cost"], f"edges[{k}].cost")
    terminals = ((terms["s1"], terms["t1"]), (terms["s2"], terms["t2"]))
    return Instance(g, terminals, cost)


def loads_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstance(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return instance_from_json(doc)


def load_instance(path: str) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return loads_instance(fh.read())


# -- DOT --------------------------------------------------------------------------

PALETTE = ("red", "blue", "darkgreen", "orange", "purple", "brown", "magenta")


def _q(x) -> str:
    return '"' + str(x).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(
    g: Graph,
    cost: Mapping | None = None,
    highlight=None,
    vertex_labels: Mapping | None = None,
    name: str = "G",
) -> str:
    """DOT text for ``g``.

    ``highlight`` is either a collection of edge ids (drawn red and bold) or a
    mapping from edge id to colour. ``vertex_labels`` adds a second line to the
    listed vertices' labels.
    """
    if highlight is None:
        colours = {}
    elif isinstance(highlight, Mapping):
        colours = dict(highlight)
    else:
        colours = {e: PALETTE[0] for e in highlight}
    labels = vertex_labels or {}
    lines = [f"graph {_q(name)} {{"]
    for v in g.vertices:
        if v in labels:
            text = _q(f"{v}\n{labels[v]}").replace("\n", "\\n")
            lines.append(f"  {_q(v)} [label={text}];")
        else:
            lines.append(f"  {_q(v)};")
    for e in g.edges:
        attrs = []
        label = str(e.id) if cost is None else f"{e.id} ({cost[e.id]})"
        attrs.append(f"label={_q(label)}")
        if e.id in colours:
            attrs.append(f"color={_q(colours[e.id])}")
            attrs.append("penwidth=2.5")
        lines.append(f"  {_q(e.u)} -- {_q(e.v)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def embedding_to_dot(emb, g: Graph, cost: Mapping | None = None) -> str:
    """Colour the five host paths of a Bad Configuration embedding and label
    the role vertices."""
    colours = {}
    for k, p in enumerate((emb.p_u, emb.p_l, emb.q1, emb.q2, emb.q3)):
        for e in p.edges:
            colours.setdefault(e, PALETTE[k])
    labels: dict = {}
    for role in sorted(emb.node_map, key=natural_key):
        labels.setdefault(emb.node_map[role], []).append(role)
    return to_dot(g, cost, colours, {v: ",".join(r) for v, r in labels.items()}, name=emb.pattern)
