"""Exact inference: moral graphs, triangulation, junction trees and variable elimination.

All heuristics break ties by variable declaration order so that the same
network always yields the same triangulation, clique order and tables.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import CliqueNotFound, FactorTooLarge, UnknownVariable, ValidationError
from .model import BayesNet, Cpt, Dag, DiscreteVariable

HEURISTICS = ("min-fill", "min-degree")


@dataclass(frozen=True)
class UndirectedGraph:
    nodes: tuple[str, ...]
    adjacency: Mapping[str, frozenset]

    @classmethod
    def from_edges(cls, nodes, edges) -> "UndirectedGraph":
        nodes = tuple(nodes)
        adj = {n: set() for n in nodes}
        for a, b in edges:
            if a == b:
                raise ValidationError(f"self-loop on {a!r}")
            adj[a].add(b)
            adj[b].add(a)
        return cls(nodes, {n: frozenset(s) for n, s in adj.items()})

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        pos = {n: i for i, n in enumerate(self.nodes)}
        out = {tuple(sorted((a, b), key=pos.__getitem__)) for a in self.nodes for b in self.adjacency[a]}
        return tuple(sorted(out, key=lambda e: (pos[e[0]], pos[e[1]])))

    def has_edge(self, a: str, b: str) -> bool:
        return b in self.adjacency[a]

    def neighbors(self, node: str) -> frozenset:
        return self.adjacency[node]

    def with_edges(self, extra) -> "UndirectedGraph":
        return UndirectedGraph.from_edges(self.nodes, list(self.edges) + list(extra))


def _dag_of(obj) -> Dag:
    return obj.dag if isinstance(obj, BayesNet) else obj


def moralize(dag) -> UndirectedGraph:
    """Skeleton of ``dag`` plus an edge between every pair of co-parents."""
    dag = _dag_of(dag)
    edges = list(dag.edges)
    for node in dag.nodes:
        edges.extend(itertools.combinations(dag.parents(node), 2))
    return UndirectedGraph.from_edges(dag.nodes, edges)


def _fill_in(adj: dict, node: str) -> list[tuple[str, str]]:
    nbrs = sorted(adj[node])
    return [(a, b) for a, b in itertools.combinations(nbrs, 2) if b not in adj[a]]


def _greedy_order(adj: dict, candidates, pos, heuristic: str):
    """Yield (node, neighbours at elimination) in greedy elimination order; mutates ``adj``."""
    remaining = set(candidates)
    while remaining:
        if heuristic == "min-fill":
            key = lambda n: (len(_fill_in(adj, n)), pos[n])
        elif heuristic == "min-degree":
            key = lambda n: (len(adj[n]), pos[n])
        else:
            raise ValidationError(f"unknown triangulation heuristic {heuristic!r}")
        node = min(remaining, key=key)
        nbrs = frozenset(adj[node])
        for a, b in _fill_in(adj, node):
            adj[a].add(b)
            adj[b].add(a)
        for n in nbrs:
            adj[n].discard(node)
        del adj[node]
        remaining.discard(node)
        yield node, nbrs


def _eliminate(g: UndirectedGraph, heuristic: str):
    pos = {n: i for i, n in enumerate(g.nodes)}
    adj = {n: set(s) for n, s in g.adjacency.items()}
    order, fills, families = [], [], []
    for node, nbrs in _greedy_order(adj, g.nodes, pos, heuristic):
        order.append(node)
        families.append(frozenset(nbrs | {node}))
        fills.extend(itertools.combinations(sorted(nbrs, key=pos.__getitem__), 2))
    return order, fills, families


def triangulate(g: UndirectedGraph, heuristic: str = "min-fill") -> tuple[UndirectedGraph, tuple[str, ...]]:
    """Chordal supergraph of ``g`` and the greedy elimination order that built it."""
    order, fills, _ = _eliminate(g, heuristic)
    fills = [(a, b) for a, b in fills if not g.has_edge(a, b)]
    return g.with_edges(fills), tuple(order)


@dataclass(frozen=True)
class JunctionTree:
    """Cliques in running-intersection order.

    ``parents[i]`` is the earlier clique chosen to contain ``separators[i]``;
    both are ``None``/empty for the first clique.
    """

    cliques: tuple[frozenset, ...]
    separators: tuple[frozenset, ...]
    parents: tuple[int | None, ...]
    elimination_order: tuple[str, ...]
    node_order: tuple[str, ...]

    def __len__(self):
        return len(self.cliques)

    @property
    def tree_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((p, i) for i, p in enumerate(self.parents) if p is not None)

    def sorted_members(self, members) -> tuple[str, ...]:
        pos = {n: i for i, n in enumerate(self.node_order)}
        return tuple(sorted(members, key=pos.__getitem__))

    def label(self, i: int) -> str:
        return ",".join(self.sorted_members(self.cliques[i]))

    def neighbors(self, i: int) -> list[int]:
        out = [] if self.parents[i] is None else [self.parents[i]]
        out.extend(k for k, p in enumerate(self.parents) if p == i)
        return out

    def find(self, clique) -> int:
        """Index of a clique given its index or its member set."""
        if isinstance(clique, (int, np.integer)):
            if 0 <= clique < len(self.cliques):
                return int(clique)
            raise CliqueNotFound(f"no clique with index {clique}")
        wanted = frozenset(clique.split(",")) if isinstance(clique, str) else frozenset(clique)
        for i, c in enumerate(self.cliques):
            if c == wanted:
                return i
        raise CliqueNotFound("no clique {" + ",".join(sorted(wanted)) + "}")

    def path(self, source: int, target: int) -> list[int]:
        """Clique indices on the unique tree path from ``source`` to ``target``."""
        prev = {source: None}
        frontier = [source]
        while frontier:
            nxt = []
            for c in frontier:
                for n in self.neighbors(c):
                    if n not in prev:
                        prev[n] = c
                        nxt.append(n)
            frontier = nxt
        if target not in prev:
            raise CliqueNotFound(f"clique {target} unreachable from {source}")
        out = [target]
        while out[-1] != source:
            out.append(prev[out[-1]])
        return out[::-1]

    def containing(self, variable: str) -> list[int]:
        return [i for i, c in enumerate(self.cliques) if variable in c]


def junction_tree(bn: BayesNet, heuristic: str = "min-fill") -> JunctionTree:
    """Junction tree of the triangulated moral graph of ``bn``.

    Cliques are read off the elimination, then ordered by a Prim-style
    maximum-weight sweep (weight = separator size) starting from the clique of
    the first declared root.  Ties go to the earliest-discovered clique and,
    for the attachment point, to the earliest-placed clique.
    """
    dag = bn.dag
    moral = moralize(dag)
    order, _, families = _eliminate(moral, heuristic)
    cliques = []
    for fam in families:
        if not any(fam <= c for c in cliques):
            cliques = [c for c in cliques if not c < fam]
            cliques.append(fam)

    root = dag.roots()[0]
    start = next(i for i, c in enumerate(cliques) if root in c)
    placed = [start]
    parents = {start: None}
    while len(placed) < len(cliques):
        best = None
        for k, c in enumerate(cliques):
            if k in parents:
                continue
            for rank, p in enumerate(placed):
                key = (-len(c & cliques[p]), k, rank)
                if best is None or key < best[0]:
                    best = (key, k, p)
        _, k, p = best
        parents[k] = p
        placed.append(k)

    new_index = {old: new for new, old in enumerate(placed)}
    ordered = tuple(cliques[old] for old in placed)
    par = tuple(None if parents[old] is None else new_index[parents[old]] for old in placed)
    seps = tuple(frozenset() if p is None else ordered[i] & ordered[p] for i, p in enumerate(par))
    return JunctionTree(ordered, seps, par, tuple(order), dag.nodes)


# -- factors ----------------------------------------------------------------

@dataclass(frozen=True)
class FactorTable:
    scope: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != len(self.scope):
            raise ValidationError("factor values do not match its scope")

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def reorder(self, scope: Sequence[str]) -> "FactorTable":
        scope = tuple(scope)
        axes = [self.scope.index(v) for v in scope]
        return FactorTable(scope, np.transpose(self.values, axes))

    def marginal(self, keep: Sequence[str]) -> "FactorTable":
        drop = tuple(i for i, v in enumerate(self.scope) if v not in keep)
        kept = tuple(v for v in self.scope if v in keep)
        return FactorTable(kept, self.values.sum(axis=drop)).reorder(tuple(keep))


def _expand(f: FactorTable, scope: tuple[str, ...]) -> np.ndarray:
    present = [v for v in scope if v in f.scope]
    arr = np.transpose(f.values, [f.scope.index(v) for v in present])
    shape = [arr.shape[present.index(v)] if v in f.scope else 1 for v in scope]
    return arr.reshape(shape)


def _product(factors, cards) -> FactorTable:
    scope = []
    for f in factors:
        scope.extend(v for v in f.scope if v not in scope)
    scope = tuple(scope)
    out = np.ones([cards[v] for v in scope])
    for f in factors:
        out = out * _expand(f, scope)
    return FactorTable(scope, out)


def joint_marginal(bn: BayesNet, scope: Sequence[str], *, max_states: int | None = None,
                   heuristic: str = "min-fill") -> FactorTable:
    """Exact ``p(scope)`` by variable elimination over the ancestral subgraph.

    ``max_states`` caps the size of any intermediate factor; exceeding it raises
    :class:`~tvdiam.errors.FactorTooLarge` before the factor is built.
    """
    scope = tuple(scope)
    for v in scope:
        bn.index(v)
    if len(set(scope)) != len(scope):
        raise ValidationError("scope lists a variable twice")
    if not scope:
        return FactorTable((), np.array(1.0))
    relevant = set(scope) | bn.dag.ancestors(scope)
    cards = {v.name: v.cardinality for v in bn.variables}
    factors = []
    for name in bn.names:
        if name in relevant:
            c = bn.cpt(name)
            factors.append(FactorTable(c.parent_names + (name,), c.tensor()))

    pos = {n: i for i, n in enumerate(bn.names)}
    adj = {n: set() for n in relevant}
    for f in factors:
        for a, b in itertools.combinations(f.scope, 2):
            adj[a].add(b)
            adj[b].add(a)
    hidden = [n for n in bn.names if n in relevant and n not in scope]

    def check(size):
        if max_states is not None and size > max_states:
            raise FactorTooLarge(size, max_states)

    for var, nbrs in _greedy_order(adj, hidden, pos, heuristic):
        involved = [f for f in factors if var in f.scope]
        factors = [f for f in factors if var not in f.scope]
        check(int(np.prod([cards[v] for v in nbrs | {var}], dtype=np.int64)))
        prod = _product(involved, cards)
        factors.append(FactorTable(tuple(v for v in prod.scope if v != var),
                                   prod.values.sum(axis=prod.scope.index(var))))
    check(int(np.prod([cards[v] for v in scope], dtype=np.int64)))
    result = _product(factors, cards).reorder(scope)
    return result


def compound_variable(variables: Sequence[DiscreteVariable]) -> DiscreteVariable:
    """A single variable whose levels enumerate the joint states of ``variables``."""
    if len(variables) == 1:
        return variables[0]
    levels = [",".join(combo) for combo in itertools.product(*(v.levels for v in variables))]
    return DiscreteVariable("(" + ",".join(v.name for v in variables) + ")", levels)


def conditional_table(bn: BayesNet, targets: Sequence[str], givens: Sequence[str], *,
                      max_states: int | None = None) -> Cpt:
    """Stochastic matrix ``p(targets | givens)`` with rows over the given assignments.

    Several targets are merged into one compound child variable.  Rows whose
    conditioning assignment has probability zero are filled uniformly and
    listed in ``flagged_rows``.
    """
    targets, givens = tuple(targets), tuple(givens)
    if not targets:
        raise ValidationError("conditional_table needs at least one target")
    if set(targets) & set(givens):
        raise ValidationError("targets and givens overlap")
    joint = joint_marginal(bn, givens + targets, max_states=max_states)
    given_vars = [bn.variable(g) for g in givens]
    target_vars = [bn.variable(t) for t in targets]
    n_rows = int(np.prod([v.cardinality for v in given_vars], dtype=np.int64))
    n_cols = int(np.prod([v.cardinality for v in target_vars], dtype=np.int64))
    rows = joint.values.reshape(n_rows, n_cols)
    mass = rows.sum(axis=1)
    flagged = np.flatnonzero(mass <= 0.0)
    safe = np.where(mass > 0.0, mass, 1.0)
    table = rows / safe[:, None]
    table[flagged] = 1.0 / n_cols
    return Cpt(compound_variable(target_vars), given_vars, table, flagged_rows=flagged)


def mutual_information(bn: BayesNet, x: str, y: str, *, max_states: int | None = None) -> float:
    """Mutual information between ``x`` and ``y`` in nats (``0 ln 0 = 0``)."""
    if x == y:
        raise ValidationError("mutual information needs two distinct variables")
    for v in (x, y):
        if v not in bn:
            raise UnknownVariable(v)
    pxy = joint_marginal(bn, (x, y), max_states=max_states).values
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    mask = pxy > 0
    return float(np.sum(pxy[mask] * np.log(pxy[mask] / (px * py)[mask])))
