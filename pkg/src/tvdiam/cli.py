"""``tvdiam`` command-line front end.

Exit status is 0 on success, 1 when the network or an analysis fails, and 2 on
usage errors.  Data goes to the chosen output; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FactorTooLarge, TvdiamError
from .inference import HEURISTICS, junction_tree
from .io.canonical import load_network, serialize_network
from .io.dot import DotAnnotations, emit_dot, emit_jtree_dot
from .io.reports import Report, emit_report
from .model import ROW_TOL
from .propagation import MODES, impact, impact_map
from .refinement import amalgamate_levels, asymmetry_scan, suggest_amalgamation
from .sensitivity import (
    DEFAULT_W,
    MAX_TRAIL_LENGTH,
    MAX_TRAILS,
    active_simple_trails,
    edge_strengths,
    influence_ranking,
    node_diameters,
)

MAX_STATES = 2**24
THREADS_ENV = "TVDIAM_THREADS"

# Output formats each subcommand can produce; the first is the default.
FORMATS = {
    "validate": ("csv", "json"),
    "diameters": ("csv", "json", "dot"),
    "edge-strength": ("csv", "json", "dot"),
    "influence": ("csv", "json"),
    "trails": ("csv", "json"),
    "impact": ("csv", "json", "dot"),
    "jtree": ("csv", "json", "dot"),
    "amalgamate": ("csv", "json"),
    "asymmetry": ("csv", "json"),
    "convert": (),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: Path
    output: Path | None = None
    format: str = "csv"
    tol: float = ROW_TOL
    max_length: int = MAX_TRAIL_LENGTH
    max_trails: int = MAX_TRAILS
    heuristic: str = "min-fill"
    mode: str = "bounded"
    threshold: float = 0.05
    max_states: int | None = MAX_STATES
    threads: int = 1
    options: dict = field(default_factory=dict)


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("network", help="network file (.bif or .json)")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")
    common.add_argument("--format", help="output format (csv, json or dot where supported)")
    common.add_argument("--tol", type=float, default=ROW_TOL, help="row-sum tolerance (default 1e-6)")
    common.add_argument("--max-length", type=int, default=MAX_TRAIL_LENGTH, help="maximum trail length")
    common.add_argument("--max-trails", type=int, default=MAX_TRAILS, help="maximum number of trails")
    common.add_argument("--heuristic", choices=HEURISTICS, default="min-fill", help="triangulation heuristic")
    common.add_argument("--force", action="store_true",
                        help=f"lift the {MAX_STATES}-state limit on intermediate factors")

    parser = argparse.ArgumentParser(prog="tvdiam", description="Diameter-based sensitivity analysis of discrete BNs.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    sub.add_parser("validate", parents=[common], help="check a network and report its size")
    p = sub.add_parser("diameters", parents=[common], help="CPT diameters of non-root nodes")
    p.add_argument("--lower", action="store_true", help="also report lower diameters")
    sub.add_parser("edge-strength", parents=[common], help="strength of every edge")
    p = sub.add_parser("influence", parents=[common], help="rank nodes by influence on a target")
    p.add_argument("--target", required=True)
    p.add_argument("--measure", default="mi,dwi,ewi", help="comma list drawn from mi, dwi, ewi")
    p.add_argument("--w", default=",".join(f"{w:g}" for w in DEFAULT_W), help="comma list of DWI weights")
    p = sub.add_parser("trails", parents=[common], help="active simple trails between two nodes")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p = sub.add_parser("impact", parents=[common], help="clique impacts on an output variable")
    p.add_argument("--target", required=True)
    p.add_argument("--mode", choices=MODES, default="bounded")
    p.add_argument("--source", help="single source clique, e.g. 'smoke,bronc,lung'")
    p.add_argument("--allow-children", action="store_true", help="accept a target that has children")
    sub.add_parser("jtree", parents=[common], help="junction tree cliques and separators")
    p = sub.add_parser("amalgamate", parents=[common], help="merge two levels of a variable")
    p.add_argument("--node", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--levels", help="two levels to merge, e.g. '10-49,50-249'")
    g.add_argument("--suggest", action="store_true", help="rank candidate level pairs")
    p.add_argument("--write-network", help="also save the merged network (.bif or .json)")
    p = sub.add_parser("asymmetry", parents=[common], help="scan a CPT for context-specific/partial independences")
    p.add_argument("--node", required=True)
    p.add_argument("--threshold", type=float, default=0.05)
    p = sub.add_parser("convert", parents=[common], help="rewrite a network as json or bif")
    p.add_argument("--to", choices=("json", "bif"), required=True)
    return parser


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def make_config(ns: argparse.Namespace) -> RunConfig:
    """Validate parsed flags; nothing is read from disk here."""
    cmd = ns.command
    allowed = FORMATS[cmd]
    if cmd == "convert":
        if ns.format is not None:
            raise UsageError("convert takes --to, not --format")
        fmt = ns.to
    else:
        fmt = ns.format or allowed[0]
        if fmt not in allowed:
            raise UsageError(f"{cmd} supports --format {', '.join(allowed)}; got {fmt!r}")
    if not 0 < ns.tol < 1:
        raise UsageError("--tol must lie in (0, 1)")
    if ns.max_length < 1 or ns.max_trails < 1:
        raise UsageError("--max-length and --max-trails must be positive")
    opts = {k: v for k, v in vars(ns).items()
            if k not in {"command", "network", "output", "format", "tol", "max_length", "max_trails",
                         "heuristic", "force", "mode", "threshold"}}
    if cmd == "influence":
        measures = _csv_list(ns.measure)
        bad = sorted(set(measures) - {"mi", "dwi", "ewi"})
        if not measures or bad:
            raise UsageError(f"--measure takes a comma list of mi, dwi, ewi; got {ns.measure!r}")
        try:
            ws = [float(w) for w in _csv_list(ns.w)]
        except ValueError:
            raise UsageError(f"--w takes a comma list of numbers; got {ns.w!r}") from None
        if not ws or any(not 0 < w <= 1 for w in ws):
            raise UsageError("every --w value must lie in (0, 1]")
        opts.update(measure=tuple(measures), w=tuple(ws))
    if cmd == "amalgamate" and ns.levels is not None:
        levels = _csv_list(ns.levels)
        if len(levels) != 2:
            raise UsageError("--levels takes exactly two comma-separated levels")
        opts["levels"] = tuple(levels)
    if cmd == "amalgamate" and ns.write_network and Path(ns.write_network).suffix.lower() not in (".bif", ".json"):
        raise UsageError("--write-network needs a .bif or .json file name")
    threshold = getattr(ns, "threshold", 0.05)
    if not 0 <= threshold <= 1:
        raise UsageError("--threshold must lie in [0, 1]")
    return RunConfig(
        command=cmd,
        input=Path(ns.network),
        output=Path(ns.output) if ns.output else None,
        format=fmt,
        tol=ns.tol,
        max_length=ns.max_length,
        max_trails=ns.max_trails,
        heuristic=ns.heuristic,
        mode=getattr(ns, "mode", "bounded"),
        threshold=threshold,
        max_states=None if ns.force else MAX_STATES,
        threads=_threads(),
        options=opts,
    )


def _warn(msg: str) -> None:
    print(f"tvdiam: warning: {msg}", file=sys.stderr)


def _report(obj, fmt, kind=None) -> str:
    return emit_report(obj, fmt, kind)


def _cmd_validate(bn, cfg, warnings):
    rows = [("nodes", len(bn)), ("edges", len(bn.dag.edges)),
            ("parameters", sum(c.table.size for c in bn.cpts)), ("warnings", len(warnings))]
    return _report(Report("validate", ("item", "value"), rows, {"network": bn.name}), cfg.format)


def _cmd_diameters(bn, cfg, warnings):
    lower = cfg.options.get("lower", False)
    items = node_diameters(bn, lower=lower)
    if cfg.format == "dot":
        return emit_dot(bn, DotAnnotations.build(node_values={d.node: d.upper for d in items}))
    return _report(items, cfg.format, "diameters-lower" if lower else "diameters")


def _cmd_edge_strength(bn, cfg, warnings):
    strengths = edge_strengths(bn)
    if cfg.format == "dot":
        return emit_dot(bn, DotAnnotations.build(strengths))
    return _report(list(strengths.values()), cfg.format, "edge-strength")


def _cmd_influence(bn, cfg, warnings):
    o = cfg.options
    ranking = influence_ranking(bn, o["target"], o["w"], measures=o["measure"], max_states=cfg.max_states,
                                threads=cfg.threads, max_length=cfg.max_length, max_trails=cfg.max_trails)
    if ranking.truncated:
        _warn("trail enumeration hit a cap; DWI/EWI values are partial sums")
    return _report(ranking, cfg.format)


def _cmd_trails(bn, cfg, warnings):
    enum = active_simple_trails(bn.dag, cfg.options["source"], cfg.options["target"],
                                max_length=cfg.max_length, max_trails=cfg.max_trails)
    if enum.truncated:
        _warn("trail enumeration hit a cap; the list is incomplete")
    return _report(enum, cfg.format)


def _chain_report(bn, chain) -> Report:
    rows = [(k + 1, ",".join(l.targets), ",".join(l.givens), l.diameter, "degenerate" if l.degenerate else "")
            for k, l in enumerate(chain.links + (chain.terminal,))]
    meta = {"target": chain.target, "source": chain.source, "target_clique": chain.target_clique,
            "mode": chain.mode, "impact": chain.impact, "flags": list(chain.flags)}
    return Report("impact-chain", ("step", "targets", "givens", "diameter", "flags"), rows, meta)


def _cmd_impact(bn, cfg, warnings):
    o = cfg.options
    jt = junction_tree(bn, cfg.heuristic)
    if o.get("source"):
        chain = impact(bn, jt, o["source"], o["target"], cfg.mode, allow_children=o["allow_children"],
                       max_states=cfg.max_states)
        if cfg.format == "dot":
            values = [chain.impact if i == chain.source else 0.0 for i in range(len(jt))]
            return emit_jtree_dot(jt, values, name=f"{bn.name}_impact_{o['target']}")
        return _report(_chain_report(bn, chain), cfg.format)
    imap = impact_map(bn, o["target"], cfg.mode, jt=jt, allow_children=o["allow_children"],
                      max_states=cfg.max_states)
    if imap.monotonicity_violations(1e-9):
        _warn("impact map is not monotone along the tree")
    if cfg.format == "dot":
        return emit_jtree_dot(jt, list(imap.impacts), name=f"{bn.name}_impact_{o['target']}")
    return _report(imap, cfg.format)


def _cmd_jtree(bn, cfg, warnings):
    jt = junction_tree(bn, cfg.heuristic)
    if cfg.format == "dot":
        return emit_jtree_dot(jt, name=f"{bn.name}_jtree")
    return _report(jt, cfg.format)


def _cmd_amalgamate(bn, cfg, warnings):
    o = cfg.options
    if o.get("suggest"):
        return _report(suggest_amalgamation(bn, o["node"]), cfg.format, "amalgamation-suggestions")
    rep = amalgamate_levels(bn, o["node"], *o["levels"])
    if o.get("write_network"):
        path = Path(o["write_network"])
        path.write_text(serialize_network(rep.network, path.suffix.lower().lstrip(".")), encoding="utf-8")
    return _report(rep, cfg.format)


def _cmd_asymmetry(bn, cfg, warnings):
    return _report(asymmetry_scan(bn, cfg.options["node"], cfg.threshold), cfg.format, "asymmetry")


def _cmd_convert(bn, cfg, warnings):
    return serialize_network(bn, cfg.format)


COMMANDS = {
    "validate": _cmd_validate,
    "diameters": _cmd_diameters,
    "edge-strength": _cmd_edge_strength,
    "influence": _cmd_influence,
    "trails": _cmd_trails,
    "impact": _cmd_impact,
    "jtree": _cmd_jtree,
    "amalgamate": _cmd_amalgamate,
    "asymmetry": _cmd_asymmetry,
    "convert": _cmd_convert,
}


def execute(cfg: RunConfig) -> str:
    """Load the network named in ``cfg`` and return the rendered output."""
    doc = load_network(cfg.input, tol=cfg.tol)
    for w in doc.warnings:
        _warn(w)
    return COMMANDS[cfg.command](doc.network, cfg, doc.warnings)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(ns)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"tvdiam: error: {exc}", file=sys.stderr)
        return 2
    try:
        text = execute(cfg)
        if cfg.output is None:
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            cfg.output.write_text(text, encoding="utf-8")
    except FactorTooLarge as exc:
        print(f"tvdiam: error: {exc} (rerun with --force to lift the limit)", file=sys.stderr)
        return 1
    except TvdiamError as exc:
        print(f"tvdiam: error: {cfg.input}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"tvdiam: error: file not found: {exc.filename}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"tvdiam: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
