"""Canonical JSON network format (schema ``tvdiam/1``).

The document mirrors the in-memory model one to one::

    {"schema": "tvdiam/1", "name": ..., "properties": [...],
     "variables": [{"name", "levels", "ordinal", "properties"}],
     "edges": [[parent, child], ...],
     "cpts": [{"child", "parents", "table": [[row], ...], "properties"}]}

CPT rows follow the canonical mixed-radix order (first parent most significant).
"""
from __future__ import annotations

import json
from pathlib import Path

from ..errors import ParentMismatch, UnknownVariable, ValidationError
from ..model import ROW_TOL, BayesNet, Cpt, DiscreteVariable, build_network
from .bif import NetworkDocument, parse_bif, write_bif

SCHEMA = "tvdiam/1"


def network_to_dict(bn: BayesNet) -> dict:
    return {
        "schema": SCHEMA,
        "name": bn.name,
        "properties": list(bn.properties),
        "variables": [
            {"name": v.name, "levels": list(v.levels), "ordinal": v.ordinal, "properties": list(v.properties)}
            for v in bn.variables
        ],
        "edges": [list(e) for e in bn.dag.edges],
        "cpts": [
            {"child": c.child.name, "parents": list(c.parent_names),
             "table": c.table.tolist(), "properties": list(c.properties)}
            for c in bn.cpts
        ],
    }


def network_from_dict(doc: dict, *, tol: float = ROW_TOL) -> BayesNet:
    if doc.get("schema") != SCHEMA:
        raise ValidationError(f"unsupported schema {doc.get('schema')!r}; expected {SCHEMA!r}")
    try:
        variables = [
            DiscreteVariable(v["name"], v["levels"], bool(v.get("ordinal", False)), tuple(v.get("properties", ())))
            for v in doc["variables"]
        ]
        by_name = {v.name: v for v in variables}
        cpts = []
        for c in doc["cpts"]:
            if c["child"] not in by_name:
                raise UnknownVariable(c["child"])
            missing = [p for p in c["parents"] if p not in by_name]
            if missing:
                raise UnknownVariable(missing[0])
            cpts.append(Cpt(by_name[c["child"]], [by_name[p] for p in c["parents"]], c["table"],
                            tol=tol, properties=tuple(c.get("properties", ()))))
        edges = [tuple(e) for e in doc["edges"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed network document: {exc!r}") from None
    if len(edges) != sum(len(c.parents) for c in cpts):
        raise ParentMismatch(doc.get("name", "network"), "edge list and CPT parent lists disagree")
    return build_network(variables, edges, cpts, name=doc.get("name", "network"),
                         properties=tuple(doc.get("properties", ())))


def write_json(bn: BayesNet) -> str:
    return json.dumps(network_to_dict(bn), indent=2) + "\n"


def parse_json(text: str, *, tol: float = ROW_TOL) -> NetworkDocument:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON at line {exc.lineno}, col {exc.colno}: {exc.msg}") from None
    bn = network_from_dict(doc, tol=tol)
    return NetworkDocument("json", bn, bn.warnings)


def parse_network(text: str, fmt: str | None = None, *, tol: float = ROW_TOL) -> NetworkDocument:
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "bif"
    if fmt == "json":
        return parse_json(text, tol=tol)
    if fmt == "bif":
        return parse_bif(text, tol=tol)
    raise ValidationError(f"unknown network format {fmt!r}")


def load_network(path, *, tol: float = ROW_TOL) -> NetworkDocument:
    """Read a ``.bif`` or ``.json`` network file (other suffixes are sniffed)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    fmt = {".bif": "bif", ".json": "json"}.get(path.suffix.lower())
    return parse_network(text, fmt, tol=tol)


def serialize_network(bn: BayesNet, fmt: str) -> str:
    if fmt == "json":
        return write_json(bn)
    if fmt == "bif":
        return write_bif(bn)
    raise ValidationError(f"unknown network format {fmt!r}")
