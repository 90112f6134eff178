"""Edge strength, active trails and node influence measures."""
from __future__ import annotations

import itertools
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import MissingStrength, NotAnEdge, TrailCapExceeded, UnknownVariable, ValidationError, WOutOfRange
from .inference import mutual_information
from .model import BayesNet, Dag, context_rows, sub_cpt
from .variation import lower_diameter, upper_diameter

MAX_TRAIL_LENGTH = 12
MAX_TRAILS = 10**6
DEFAULT_W = (0.1, 0.2, 0.5, 1.0)


def _dag(obj) -> Dag:
    return obj.dag if isinstance(obj, BayesNet) else obj


# -- diameters and edge strength ---------------------------------------------

@dataclass(frozen=True)
class NodeDiameter:
    node: str
    parents: tuple[str, ...]
    upper: float
    upper_witness: tuple[int, int]
    lower: float | None = None
    lower_witness: tuple[int, int] | None = None


def node_diameters(bn: BayesNet, *, include_roots: bool = False, lower: bool = False) -> list[NodeDiameter]:
    """Upper (and optionally lower) diameter of every CPT, in declaration order."""
    out = []
    for c in bn.cpts:
        if not c.parents and not include_roots:
            continue
        up = upper_diameter(c)
        lo = lower_diameter(c) if lower and c.n_rows > 1 else None
        out.append(NodeDiameter(c.child.name, c.parent_names, up.value, up.witness,
                                lo.value if lo else None, lo.witness if lo else None))
    return out


@dataclass(frozen=True)
class EdgeStrength:
    """Strength of ``edge = (j, i)``: the largest diameter over contexts of the other parents."""

    edge: tuple[str, str]
    value: float
    witness_context: dict = field(hash=False)
    witness_rows: tuple[int, int]


def contexts(bn: BayesNet, node: str, varying: str):
    """All assignments (level names) of the parents of ``node`` other than ``varying``."""
    others = [bn.variable(p) for p in bn.parents(node) if p != varying]
    for combo in itertools.product(*(v.levels for v in others)):
        yield dict(zip((v.name for v in others), combo))


def edge_strength(bn: BayesNet, edge) -> EdgeStrength:
    j, i = edge
    if i not in bn or j not in bn.parents(i):
        raise NotAnEdge(edge)
    cpt = bn.cpt(i)
    best = None
    for ctx in contexts(bn, i, j):
        d = upper_diameter(sub_cpt(cpt, ctx))
        if best is None or d.value > best[0].value:
            best = (d, ctx)
    d, ctx = best
    rows = context_rows(cpt, ctx)
    return EdgeStrength((j, i), d.value, ctx, (int(rows[d.witness[0]]), int(rows[d.witness[1]])))


def edge_strengths(bn: BayesNet) -> dict[tuple[str, str], EdgeStrength]:
    return {e: edge_strength(bn, e) for e in bn.dag.edges}


# -- trails -----------------------------------------------------------------

@dataclass(frozen=True)
class Trail:
    """A simple trail; ``edges`` keep the DAG orientation ``(parent, child)``."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __len__(self):
        return len(self.edges)

    def __str__(self):
        parts = [self.nodes[0]]
        for (a, _), node in zip(self.edges, self.nodes[1:]):
            parts.append("->" if a != node else "<-")
            parts.append(node)
        return " ".join(parts)


@dataclass(frozen=True)
class TrailEnumeration:
    source: str
    target: str
    trails: tuple[Trail, ...]
    truncated: bool = False

    def __iter__(self):
        return iter(self.trails)

    def __len__(self):
        return len(self.trails)


def _reachable(dag: Dag, start: str, goal: str, blocked: set) -> bool:
    seen, queue = {start}, deque([start])
    while queue:
        n = queue.popleft()
        if n == goal:
            return True
        for m in dag.parents(n) + dag.children(n):
            if m not in seen and m not in blocked:
                seen.add(m)
                queue.append(m)
    return False


def active_simple_trails(dag, j: str, i: str, *, max_length: int = MAX_TRAIL_LENGTH,
                         max_trails: int = MAX_TRAILS) -> TrailEnumeration:
    """Simple skeleton trails from ``j`` to ``i`` with no collider among the interior nodes.

    Evidence is empty, so a trail is active exactly when no interior node has
    both of its trail edges pointing into it.  Trails come back shortest first,
    then lexicographically by node declaration index.  If a cap stops the
    search the result has ``truncated=True``.
    """
    dag = _dag(dag)
    for n in (j, i):
        if n not in dag.nodes:
            raise UnknownVariable(n)
    if j == i:
        raise ValidationError("trail endpoints must differ")
    pos = {n: k for k, n in enumerate(dag.nodes)}
    neighbours = {n: sorted(dag.parents(n) + dag.children(n), key=pos.__getitem__) for n in dag.nodes}
    found: list[tuple[tuple[str, ...], tuple]] = []
    truncated = False

    path = [j]
    edges: list[tuple[str, str]] = []
    on_path = {j}

    def legal(nxt):
        if nxt in on_path:
            return False
        if len(path) >= 2:
            v, u = path[-1], path[-2]
            if edges[-1] == (u, v) and nxt in dag.parents(v):
                return False
        return True

    def orient(a, b):
        return (a, b) if b in dag.children(a) else (b, a)

    def visit():
        nonlocal truncated
        v = path[-1]
        for nxt in neighbours[v]:
            if truncated and len(found) >= max_trails:
                return
            if not legal(nxt):
                continue
            if nxt == i:
                if len(found) >= max_trails:
                    truncated = True
                    return
                found.append((tuple(path) + (i,), tuple(edges) + (orient(v, i),)))
                continue
            if len(edges) + 1 >= max_length:
                if not truncated and _reachable(dag, nxt, i, on_path):
                    truncated = True
                continue
            path.append(nxt)
            edges.append(orient(v, nxt))
            on_path.add(nxt)
            visit()
            on_path.discard(nxt)
            edges.pop()
            path.pop()

    visit()
    found.sort(key=lambda t: (len(t[0]), [pos[n] for n in t[0]]))
    return TrailEnumeration(j, i, tuple(Trail(n, e) for n, e in found), truncated)


def _checked(enum: TrailEnumeration, value: float, strict: bool) -> float:
    if enum.truncated and strict:
        raise TrailCapExceeded(
            f"trail enumeration {enum.source} -> {enum.target} hit its cap", partial=value
        )
    return value


def dwi(dag, j: str, i: str, w: float, *, strict: bool = True, **caps) -> float:
    """Distance weighted influence: sum of ``w ** len(trail)`` over active simple trails."""
    if not 0 < w <= 1:
        raise WOutOfRange(f"w must lie in (0, 1], got {w!r}")
    enum = active_simple_trails(dag, j, i, **caps)
    return _checked(enum, math.fsum(w ** len(t) for t in enum), strict)


def ewi(dag, strengths: Mapping, j: str, i: str, *, strict: bool = True, **caps) -> float:
    """Edge weighted influence: sum over active simple trails of (product of strengths) ** len(trail).

    ``strengths`` maps ``(parent, child)`` to a number in [0, 1] (an
    :class:`EdgeStrength`, a bootstrap frequency, an elicited value...).
    """
    enum = active_simple_trails(dag, j, i, **caps)
    return _checked(enum, _ewi_sum(enum, strengths), strict)


def _strength_value(strengths, e):
    if e not in strengths:
        raise MissingStrength(e)
    s = strengths[e]
    return s.value if isinstance(s, EdgeStrength) else float(s)


def _ewi_sum(enum, strengths):
    terms = []
    for t in enum:
        prod = 1.0
        for e in t.edges:
            prod *= _strength_value(strengths, e)
        terms.append(prod ** len(t))
    return math.fsum(terms)


# -- ranking ----------------------------------------------------------------

@dataclass(frozen=True)
class InfluenceRow:
    node: str
    values: dict
    ranks: dict


@dataclass(frozen=True)
class InfluenceRanking:
    """Influence of every other node on ``target``.

    ``values``/``ranks`` of each row are keyed by column name: ``mi`` (nats),
    ``dwi@<w>`` and ``ewi``.  Rank 1 is the most influential; ties share the
    mean rank.  ``spearman`` holds each column's rank correlation with ``mi``
    (``None`` when undefined).
    """

    target: str
    columns: tuple[str, ...]
    rows: tuple[InfluenceRow, ...]
    spearman: dict
    truncated: bool = False


def mean_ranks(values: Sequence[float]) -> np.ndarray:
    """Descending ranks (largest value gets 1) with ties sharing their mean rank."""
    return rankdata(-np.asarray(values, dtype=np.float64), method="average")


def spearman(a: Sequence[float], b: Sequence[float]) -> float | None:
    ra, rb = mean_ranks(a), mean_ranks(b)
    if len(ra) < 2 or np.ptp(ra) == 0 or np.ptp(rb) == 0:
        return None
    rho = float(np.corrcoef(ra, rb)[0, 1])
    return max(-1.0, min(1.0, rho))


def influence_ranking(bn: BayesNet, target: str, w_list: Sequence[float] = DEFAULT_W, *,
                      measures: Sequence[str] = ("mi", "dwi", "ewi"), strengths: Mapping | None = None,
                      max_states: int | None = None, threads: int = 1,
                      max_length: int = MAX_TRAIL_LENGTH, max_trails: int = MAX_TRAILS) -> InfluenceRanking:
    """MI, DWI and EWI of every non-target node on ``target`` plus per-measure ranks."""
    bn.index(target)
    measures = tuple(measures)
    unknown = set(measures) - {"mi", "dwi", "ewi"}
    if unknown:
        raise ValidationError(f"unknown measures: {', '.join(sorted(unknown))}")
    for w in w_list:
        if not 0 < w <= 1:
            raise WOutOfRange(f"w must lie in (0, 1], got {w!r}")
    columns = []
    if "mi" in measures:
        columns.append("mi")
    if "dwi" in measures:
        columns.extend(f"dwi@{w:g}" for w in w_list)
    if "ewi" in measures:
        columns.append("ewi")
        if strengths is None:
            strengths = edge_strengths(bn)
    caps = dict(max_length=max_length, max_trails=max_trails)
    nodes = [n for n in bn.names if n != target]

    def compute(node):
        vals, trunc = {}, False
        if "mi" in measures:
            vals["mi"] = mutual_information(bn, node, target, max_states=max_states)
        if "dwi" in measures or "ewi" in measures:
            enum = active_simple_trails(bn.dag, node, target, **caps)
            trunc = enum.truncated
            for w in (w_list if "dwi" in measures else ()):
                vals[f"dwi@{w:g}"] = math.fsum(w ** len(t) for t in enum)
            if "ewi" in measures:
                vals["ewi"] = _ewi_sum(enum, strengths)
        return vals, trunc

    if threads > 1 and len(nodes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(compute, nodes))
    else:
        results = [compute(n) for n in nodes]

    ranks = {c: mean_ranks([r[0][c] for r in results]) for c in columns} if results else {}
    rows = tuple(
        InfluenceRow(n, vals, {c: float(ranks[c][k]) for c in columns})
        for k, (n, (vals, _)) in enumerate(zip(nodes, results))
    )
    rho = {}
    if "mi" in columns:
        mi = [r.values["mi"] for r in rows]
        rho = {c: spearman(mi, [r.values[c] for r in rows]) for c in columns if c != "mi"}
    return InfluenceRanking(target, tuple(columns), rows, rho, any(t for _, t in results))
