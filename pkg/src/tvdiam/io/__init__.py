from .bif import NetworkDocument, parse_bif, write_bif
from .canonical import load_network, parse_json, parse_network, serialize_network, write_json
from .dot import DotAnnotations, emit_dot, emit_jtree_dot
from .reports import Report, as_report, emit_report

__all__ = [
    "DotAnnotations",
    "NetworkDocument",
    "Report",
    "as_report",
    "emit_dot",
    "emit_jtree_dot",
    "emit_report",
    "load_network",
    "parse_bif",
    "parse_json",
    "parse_network",
    "serialize_network",
    "write_bif",
    "write_json",
]
