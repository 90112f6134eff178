"""Graphviz DOT output for networks and junction trees."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..errors import UnknownAnnotationTarget, ValidationError
from ..inference import JunctionTree
from ..model import BayesNet

MIN_PENWIDTH = 0.5
MAX_PENWIDTH = 5.0
_WHITE = (255, 255, 255)
_DARK = (8, 48, 107)


@dataclass(frozen=True)
class DotAnnotations:
    """Optional decorations: edge labels/widths from strengths, node fills from values in [0, 1]."""

    edge_labels: Mapping[tuple[str, str], float] = field(default_factory=dict)
    edge_widths: Mapping[tuple[str, str], float] = field(default_factory=dict)
    node_fills: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def build(cls, strengths: Mapping | None = None, node_values: Mapping | None = None) -> "DotAnnotations":
        strengths = {e: getattr(s, "value", s) for e, s in (strengths or {}).items()}
        return cls(
            edge_labels=dict(strengths),
            edge_widths={e: penwidth(v) for e, v in strengths.items()},
            node_fills=dict(node_values or {}),
        )


def penwidth(strength: float) -> float:
    """Affine map of a strength in [0, 1] onto [0.5, 5.0]."""
    s = min(max(float(strength), 0.0), 1.0)
    return MIN_PENWIDTH + (MAX_PENWIDTH - MIN_PENWIDTH) * s


def fill_color(value: float) -> str:
    """Linear white-to-dark-blue ramp for a value in [0, 1]."""
    v = min(max(float(value), 0.0), 1.0)
    rgb = (round(w + (d - w) * v) for w, d in zip(_WHITE, _DARK))
    return "#" + "".join(f"{c:02x}" for c in rgb)


def _id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _node_attrs(value: float | None, label: str, spec: str = ".2f") -> str:
    if value is None:
        return ""
    font = "#ffffff" if value >= 0.5 else "#000000"
    text = label + "\n" + format(value, spec)
    return (f' [label={_id(text)}, style=filled, '
            f'fillcolor="{fill_color(value)}", fontcolor="{font}"]')


def emit_dot(bn: BayesNet, annotations: DotAnnotations | None = None) -> str:
    """DOT digraph of ``bn``; nodes and edges in declaration order."""
    ann = annotations or DotAnnotations()
    edges = set(bn.dag.edges)
    for key in list(ann.edge_labels) + list(ann.edge_widths):
        if tuple(key) not in edges:
            raise UnknownAnnotationTarget(f"no edge {key!r} in the network")
    for key in ann.node_fills:
        if key not in bn:
            raise UnknownAnnotationTarget(f"no node {key!r} in the network")
    lines = [f"digraph {_id(bn.name)} {{"]
    for n in bn.names:
        lines.append(f"  {_id(n)}{_node_attrs(ann.node_fills.get(n), n)};")
    for a, b in bn.dag.edges:
        attrs = []
        if (a, b) in ann.edge_labels:
            attrs.append(f'label="{ann.edge_labels[(a, b)]:.2f}"')
        if (a, b) in ann.edge_widths:
            attrs.append(f"penwidth={ann.edge_widths[(a, b)]:.3f}")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_id(a)} -> {_id(b)}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_jtree_dot(jt: JunctionTree, values=None, *, name: str = "junction_tree") -> str:
    """DOT graph of a junction tree; ``values`` (one per clique) colour the cliques.

    Clique values are printed with four significant digits.
    """
    if values is not None and len(values) != len(jt):
        raise ValidationError("one value per clique is required")
    lines = [f"graph {_id(name)} {{", "  node [shape=ellipse];"]
    for i in range(len(jt)):
        label = jt.label(i)
        attrs = _node_attrs(None if values is None else values[i], label, ".4g") or f" [label={_id(label)}]"
        lines.append(f"  c{i}{attrs};")
    for p, i in jt.tree_edges:
        sep = ",".join(jt.sorted_members(jt.separators[i]))
        lines.append(f"  c{p} -- c{i} [label={_id(sep)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
