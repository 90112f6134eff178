"""Tabular CSV/JSON reports for every analysis result.

Each result is flattened into a :class:`Report` (kind, ordered columns, rows,
metadata).  Reals are written with six decimals in both formats; JSON
documents carry ``"schema": "tvdiam/1"``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

from ..errors import ValidationError
from ..inference import JunctionTree
from ..propagation import ImpactMap
from ..refinement import AmalgamationCandidate, AmalgamationReport, AsymmetryFinding
from ..sensitivity import EdgeStrength, InfluenceRanking, NodeDiameter, TrailEnumeration

SCHEMA = "tvdiam/1"
DECIMALS = 6


@dataclass
class Report:
    kind: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)


COLUMNS = {
    "diameters": ("node", "diameter"),
    "diameters-lower": ("node", "diameter", "lower_diameter"),
    "edge-strength": ("parent", "child", "strength", "context", "witness_rows"),
    "trails": ("index", "length", "trail"),
    "impact": ("clique", "members", "impact", "target_clique", "path", "flags"),
    "jtree": ("clique", "members", "parent", "separator"),
    "amalgamation": ("child", "before", "after"),
    "amalgamation-suggestions": ("level_a", "level_b", "score", "diameter_drop"),
    "asymmetry": ("node", "varying", "context", "csi_index", "partial_index", "partial_witness", "kind"),
}


def _ctx(d: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in d.items())


def _diameters(items):
    lower = any(d.lower is not None for d in items)
    kind = "diameters-lower" if lower else "diameters"
    rows = [(d.node, d.upper) + ((d.lower,) if lower else ()) for d in items]
    return Report("diameters", COLUMNS[kind], rows)


def _strengths(items):
    rows = [(s.edge[0], s.edge[1], s.value, _ctx(s.witness_context), f"{s.witness_rows[0]};{s.witness_rows[1]}")
            for s in items]
    return Report("edge-strength", COLUMNS["edge-strength"], rows)


def _findings(items):
    rows = []
    for f in items:
        kind = "+".join(k for k, on in (("csi", f.csi), ("partial", f.partial)) if on)
        rows.append((f.node, f.varying, _ctx(f.context), f.csi_index, f.partial_index,
                     "/".join(f.partial_witness), kind))
    return Report("asymmetry", COLUMNS["asymmetry"], rows)


def _suggestions(items):
    rows = [(c.levels[0], c.levels[1], c.score, c.diameter_drop) for c in items]
    return Report("amalgamation-suggestions", COLUMNS["amalgamation-suggestions"], rows)


_LIST_ADAPTERS = {
    NodeDiameter: _diameters,
    EdgeStrength: _strengths,
    AsymmetryFinding: _findings,
    AmalgamationCandidate: _suggestions,
}


def as_report(obj, kind: str | None = None) -> Report:
    """Flatten an analysis result into a :class:`Report`.

    Empty lists carry no type information, so they need ``kind``.
    """
    if isinstance(obj, Report):
        return obj
    if isinstance(obj, dict) and obj and all(isinstance(v, EdgeStrength) for v in obj.values()):
        obj = list(obj.values())
    if isinstance(obj, (list, tuple)):
        if not obj:
            if kind not in COLUMNS:
                raise ValidationError("an empty result needs an explicit report kind")
            return Report(kind.replace("diameters-lower", "diameters"), COLUMNS[kind])
        adapter = _LIST_ADAPTERS.get(type(obj[0]))
        if adapter is None:
            raise ValidationError(f"no report format for lists of {type(obj[0]).__name__}")
        return adapter(list(obj))
    if isinstance(obj, InfluenceRanking):
        cols = ("node",) + obj.columns + tuple(f"rank_{c}" for c in obj.columns)
        rows = [(r.node,) + tuple(r.values[c] for c in obj.columns) + tuple(r.ranks[c] for c in obj.columns)
                for r in obj.rows]
        meta = {"target": obj.target, "mi_units": "nats", "truncated": obj.truncated,
                "spearman_vs_mi": dict(obj.spearman)}
        return Report("influence", cols, rows, meta)
    if isinstance(obj, TrailEnumeration):
        rows = [(k + 1, len(t), str(t)) for k, t in enumerate(obj)]
        return Report("trails", COLUMNS["trails"], rows,
                      {"from": obj.source, "to": obj.target, "truncated": obj.truncated})
    if isinstance(obj, ImpactMap):
        jt = obj.junction_tree
        rows = [(i, jt.label(i), c.impact, c.target_clique, ">".join(map(str, c.chain.path)), ";".join(c.flags))
                for i, c in enumerate(obj.chains)]
        return Report("impact", COLUMNS["impact"], rows, {"target": obj.target, "mode": obj.mode})
    if isinstance(obj, JunctionTree):
        rows = [(i, obj.label(i), "" if p is None else p, ",".join(obj.sorted_members(obj.separators[i])))
                for i, p in enumerate(obj.parents)]
        return Report("jtree", COLUMNS["jtree"], rows,
                      {"elimination_order": list(obj.elimination_order)})
    if isinstance(obj, AmalgamationReport):
        rows = [(c.child, c.before, c.after) for c in obj.children]
        meta = {"variable": obj.variable, "merged": list(obj.merged), "merged_level": obj.merged_level,
                "own_before": obj.own_before, "own_after": obj.own_after}
        return Report("amalgamation", COLUMNS["amalgamation"], rows, meta)
    raise ValidationError(f"no report format for {type(obj).__name__}")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{DECIMALS}f}"
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        return round(v, DECIMALS)
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def emit_report(report, fmt: str = "csv", kind: str | None = None) -> str:
    """Render a result (or :class:`Report`) as ``csv`` or ``json`` text."""
    rep = as_report(report, kind)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(rep.columns)
        for row in rep.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "schema": SCHEMA,
            "kind": rep.kind,
            "meta": _json_value(rep.meta),
            "columns": list(rep.columns),
            "rows": [dict(zip(rep.columns, _json_value(list(r)))) for r in rep.rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    raise ValidationError(f"unknown report format {fmt!r}")
