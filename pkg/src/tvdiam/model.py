"""Immutable data model for discrete Bayesian networks.

Row convention used everywhere (storage, BIF output, reports): the rows of a
CPT enumerate parent assignments in mixed radix with the *first declared
parent most significant*, and levels keep their declaration order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CycleDetected,
    DuplicateName,
    IncompleteAssignment,
    LevelOutOfRange,
    NotAParent,
    ParentMismatch,
    RowSumViolation,
    UnknownVariable,
    ValidationError,
)

ROW_TOL = 1e-6


@dataclass(frozen=True)
class DiscreteVariable:
    """A named categorical variable with ordered levels."""

    name: str
    levels: tuple[str, ...]
    ordinal: bool = False
    properties: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(str(l) for l in self.levels))
        object.__setattr__(self, "properties", tuple(self.properties))
        if not self.name:
            raise ValidationError("variable name must be non-empty")
        if len(self.levels) < 2:
            raise ValidationError(f"variable {self.name!r} needs at least 2 levels")
        seen = set()
        for level in self.levels:
            if level in seen:
                raise DuplicateName(level, where=f"levels of {self.name!r}")
            seen.add(level)

    @property
    def cardinality(self) -> int:
        return len(self.levels)

    def index(self, level) -> int:
        """Position of ``level`` (a level name or an integer index)."""
        if isinstance(level, (int, np.integer)) and not isinstance(level, bool):
            if 0 <= level < len(self.levels):
                return int(level)
            raise LevelOutOfRange(self.name, level)
        try:
            return self.levels.index(str(level))
        except ValueError:
            raise LevelOutOfRange(self.name, level) from None


@dataclass(frozen=True)
class ParentAssignment:
    """Level indices for some (``complete=False``) or all parents of a CPT."""

    values: tuple[tuple[str, int], ...]
    complete: bool

    @classmethod
    def of(cls, cpt: "Cpt", mapping) -> "ParentAssignment":
        if isinstance(mapping, ParentAssignment):
            mapping = dict(mapping.values)
        by_name = {p.name: p for p in cpt.parents}
        resolved = {}
        for name, level in dict(mapping).items():
            if name not in by_name:
                raise NotAParent(name, cpt.child.name)
            resolved[name] = by_name[name].index(level)
        ordered = tuple((p.name, resolved[p.name]) for p in cpt.parents if p.name in resolved)
        return cls(ordered, complete=len(ordered) == len(cpt.parents))

    def as_dict(self) -> dict[str, int]:
        return dict(self.values)


class Cpt:
    """Stochastic matrix of one child given an ordered list of parents.

    Rows within ``tol`` of summing to one are renormalized (and a warning is
    recorded in :attr:`warnings`); rows further off raise
    :class:`~tvdiam.errors.RowSumViolation`.  ``renormalize=False`` keeps the
    stored values exactly as given, which is only meant for reproducing
    hand-typed tables whose rows do not quite sum to one.
    """

    __slots__ = ("child", "parents", "table", "properties", "tol", "warnings", "flagged_rows")

    def __init__(
        self,
        child: DiscreteVariable,
        parents: Sequence[DiscreteVariable],
        table,
        *,
        tol: float = ROW_TOL,
        renormalize: bool = True,
        properties: Iterable[str] = (),
        flagged_rows: Iterable[int] = (),
    ):
        parents = tuple(parents)
        names = [p.name for p in parents]
        if len(set(names)) != len(names):
            raise DuplicateName(next(n for n in names if names.count(n) > 1), where=f"parents of {child.name!r}")
        if child.name in names:
            raise ParentMismatch(child.name, "a variable cannot be its own parent")
        arr = np.array(table, dtype=np.float64)
        n_rows = int(np.prod([p.cardinality for p in parents], dtype=np.int64))
        if arr.ndim == 1 and n_rows == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape != (n_rows, child.cardinality):
            raise ValidationError(
                f"CPT {child.name!r} has shape {arr.shape}, expected {(n_rows, child.cardinality)}"
            )
        if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1 + tol):
            bad = int(np.argwhere(~np.isfinite(arr) | (arr < 0) | (arr > 1 + tol))[0][0])
            raise RowSumViolation(child.name, bad, float(arr[bad].sum()))
        sums = arr.sum(axis=1)
        warnings = []
        for row, total in enumerate(sums):
            dev = abs(total - 1.0)
            if dev > tol:
                raise RowSumViolation(child.name, row, float(total))
            # float noise below 1e-12 is left alone so that renormalization is idempotent
            if dev > 1e-12 and renormalize:
                arr[row] /= total
                warnings.append(f"renormalized row {row} of {child.name!r} (sum {total!r})")
        arr.setflags(write=False)
        self.child = child
        self.parents = parents
        self.table = arr
        self.properties = tuple(properties)
        self.tol = tol
        self.warnings = tuple(warnings)
        self.flagged_rows = tuple(int(r) for r in flagged_rows)

    @property
    def parent_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parents)

    @property
    def parent_cards(self) -> tuple[int, ...]:
        return tuple(p.cardinality for p in self.parents)

    @property
    def n_rows(self) -> int:
        return self.table.shape[0]

    def tensor(self) -> np.ndarray:
        """View with one axis per parent (declared order) and the child last."""
        return self.table.reshape(self.parent_cards + (self.child.cardinality,))

    def row_index(self, assignment) -> int:
        return row_index(self, assignment)

    def row_assignment(self, row: int) -> dict[str, str]:
        """Level names of the parent assignment stored in ``row``."""
        if not self.parents:
            return {}
        idx = np.unravel_index(row, self.parent_cards)
        return {p.name: p.levels[int(i)] for p, i in zip(self.parents, idx)}

    def __eq__(self, other):
        if not isinstance(other, Cpt):
            return NotImplemented
        return (
            self.child == other.child
            and self.parents == other.parents
            and self.properties == other.properties
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self):
        return hash((self.child, self.parents, self.table.tobytes()))

    def __repr__(self):
        given = f" | {', '.join(self.parent_names)}" if self.parents else ""
        return f"Cpt({self.child.name}{given}; {self.n_rows}x{self.child.cardinality})"


def row_index(cpt: Cpt, assignment) -> int:
    """Row of ``cpt`` holding a complete parent assignment.

    Mixed radix, first declared parent most significant.  ``assignment`` maps
    parent names to level names or indices.
    """
    pa = ParentAssignment.of(cpt, assignment)
    if not pa.complete:
        given = pa.as_dict()
        raise IncompleteAssignment([n for n in cpt.parent_names if n not in given])
    if not cpt.parents:
        return 0
    return int(np.ravel_multi_index(tuple(i for _, i in pa.values), cpt.parent_cards))


def sub_cpt(cpt: Cpt, fixed) -> Cpt:
    """Rows of ``cpt`` agreeing with a partial parent assignment.

    The result is a CPT over the unfixed parents (order preserved) whose rows
    are copies of the matching input rows.
    """
    pa = ParentAssignment.of(cpt, fixed)
    given = pa.as_dict()
    if not given:
        return cpt
    index = tuple(given.get(p.name, slice(None)) for p in cpt.parents)
    block = cpt.tensor()[index]
    free = tuple(p for p in cpt.parents if p.name not in given)
    rows = block.reshape(-1, cpt.child.cardinality)
    return Cpt(cpt.child, free, rows, tol=cpt.tol, renormalize=False)


def context_rows(cpt: Cpt, fixed) -> np.ndarray:
    """Indices (into ``cpt.table``) of the rows selected by ``fixed``."""
    pa = ParentAssignment.of(cpt, fixed)
    given = pa.as_dict()
    grid = np.arange(cpt.n_rows).reshape(cpt.parent_cards) if cpt.parents else np.arange(1)
    index = tuple(given.get(p.name, slice(None)) for p in cpt.parents)
    return np.asarray(grid[index]).ravel()


@dataclass(frozen=True)
class Dag:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    _parents: dict = field(default=None, repr=False, compare=False)
    _children: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple(self.nodes)
        edges = tuple((str(a), str(b)) for a, b in self.edges)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        known = set(nodes)
        if len(known) != len(nodes):
            raise DuplicateName(next(n for n in nodes if nodes.count(n) > 1))
        parents = {n: [] for n in nodes}
        children = {n: [] for n in nodes}
        seen = set()
        for a, b in edges:
            for n in (a, b):
                if n not in known:
                    raise UnknownVariable(n)
            if a == b:
                raise CycleDetected([a, a])
            if (a, b) in seen:
                raise ValidationError(f"duplicate edge ({a}, {b})")
            seen.add((a, b))
            parents[b].append(a)
            children[a].append(b)
        object.__setattr__(self, "_parents", {k: tuple(v) for k, v in parents.items()})
        object.__setattr__(self, "_children", {k: tuple(v) for k, v in children.items()})
        cycle = self._find_cycle()
        if cycle:
            raise CycleDetected(cycle)

    def _find_cycle(self):
        state = dict.fromkeys(self.nodes, 0)
        for start in self.nodes:
            if state[start]:
                continue
            stack = [(start, iter(self._children[start]))]
            path = [start]
            state[start] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    state[node] = 2
                    stack.pop()
                    path.pop()
                elif state[nxt] == 1:
                    return path[path.index(nxt):] + [nxt]
                elif state[nxt] == 0:
                    state[nxt] = 1
                    stack.append((nxt, iter(self._children[nxt])))
                    path.append(nxt)
        return None

    def parents(self, node: str) -> tuple[str, ...]:
        return self._parents[node]

    def children(self, node: str) -> tuple[str, ...]:
        return self._children[node]

    def roots(self) -> tuple[str, ...]:
        return tuple(n for n in self.nodes if not self._parents[n])

    def descendants(self, node: str) -> set[str]:
        out, stack = set(), list(self._children[node])
        while stack:
            n = stack.pop()
            if n not in out:
                out.add(n)
                stack.extend(self._children[n])
        return out

    def ancestors(self, nodes) -> set[str]:
        out, stack = set(), [p for n in nodes for p in self._parents[n]]
        while stack:
            n = stack.pop()
            if n not in out:
                out.add(n)
                stack.extend(self._parents[n])
        return out

    def topological_order(self) -> tuple[str, ...]:
        """Kahn's algorithm, always taking the earliest-declared ready node."""
        indeg = {n: len(self._parents[n]) for n in self.nodes}
        order = []
        ready = [n for n in self.nodes if indeg[n] == 0]
        pos = {n: i for i, n in enumerate(self.nodes)}
        while ready:
            ready.sort(key=pos.__getitem__)
            n = ready.pop(0)
            order.append(n)
            for c in self._children[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        return tuple(order)


class BayesNet:
    """A DAG with one validated CPT per node; immutable after construction."""

    def __init__(self, variables, dag: Dag, cpts, *, name: str = "network", properties=()):
        self.variables = tuple(variables)
        self.dag = dag
        self.cpts = tuple(cpts)
        self.name = name
        self.properties = tuple(properties)
        self._index = {v.name: i for i, v in enumerate(self.variables)}
        self.warnings = tuple(w for c in self.cpts for w in c.warnings)

    @property
    def names(self) -> tuple[str, ...]:
        return self.dag.nodes

    def __len__(self):
        return len(self.variables)

    def __contains__(self, name):
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(name) from None

    def variable(self, name: str) -> DiscreteVariable:
        return self.variables[self.index(name)]

    def cpt(self, name: str) -> Cpt:
        return self.cpts[self.index(name)]

    def parents(self, name: str) -> tuple[str, ...]:
        return self.cpt(name).parent_names

    def children(self, name: str) -> tuple[str, ...]:
        self.index(name)
        return self.dag.children(name)

    def __eq__(self, other):
        if not isinstance(other, BayesNet):
            return NotImplemented
        return (
            self.name == other.name
            and self.properties == other.properties
            and self.variables == other.variables
            and self.dag == other.dag
            and self.cpts == other.cpts
        )

    def __repr__(self):
        return f"BayesNet({self.name!r}, {len(self.variables)} nodes, {len(self.dag.edges)} edges)"


def build_network(variables, edges, cpts, *, name: str = "network", properties=()) -> BayesNet:
    """Validate and assemble a :class:`BayesNet`.

    Parameters
    ----------
    variables : sequence of DiscreteVariable
        Declaration order is kept and defines every deterministic tie-break.
    edges : iterable of (parent, child) name pairs
    cpts : iterable of Cpt
        One per variable; its parent list must be exactly the DAG parent set.

    Returns
    -------
    BayesNet
        Edges are stored in canonical order: by child declaration index, then
        by the child's CPT parent order.

    Raises
    ------
    DuplicateName, CycleDetected, ParentMismatch, RowSumViolation
    """
    variables = tuple(variables)
    by_name = {}
    for v in variables:
        if v.name in by_name:
            raise DuplicateName(v.name)
        by_name[v.name] = v
    dag = Dag(tuple(by_name), tuple(edges))

    cpt_by_child = {}
    for c in cpts:
        if c.child.name not in by_name:
            raise UnknownVariable(c.child.name)
        if c.child.name in cpt_by_child:
            raise ParentMismatch(c.child.name, "more than one CPT supplied")
        cpt_by_child[c.child.name] = c
    ordered = []
    for v in variables:
        c = cpt_by_child.get(v.name)
        if c is None:
            raise ParentMismatch(v.name, "no CPT supplied")
        if c.child != v:
            raise ParentMismatch(v.name, "CPT child variable differs from the declared one")
        if set(c.parent_names) != set(dag.parents(v.name)):
            raise ParentMismatch(
                v.name, f"CPT has ({', '.join(c.parent_names)}), DAG has ({', '.join(dag.parents(v.name))})"
            )
        for p in c.parents:
            if p != by_name[p.name]:
                raise ParentMismatch(v.name, f"parent {p.name!r} differs from its declaration")
        ordered.append(c)

    canonical = tuple((p, c.child.name) for c in ordered for p in c.parent_names)
    dag = Dag(dag.nodes, canonical)
    return BayesNet(variables, dag, ordered, name=name, properties=properties)


def make_network(variables, tables: Mapping, *, name: str = "network", tol: float = ROW_TOL,
                 renormalize: bool = True) -> BayesNet:
    """Shorthand constructor: ``tables`` maps child name to ``(parent names, rows)``."""
    variables = tuple(variables)
    by_name = {v.name: v for v in variables}
    cpts, edges = [], []
    for child, (parent_names, rows) in tables.items():
        if child not in by_name:
            raise UnknownVariable(child)
        parents = []
        for p in parent_names:
            if p not in by_name:
                raise UnknownVariable(p)
            parents.append(by_name[p])
            edges.append((p, child))
        cpts.append(Cpt(by_name[child], parents, rows, tol=tol, renormalize=renormalize))
    return build_network(variables, edges, cpts, name=name)


def replace_cpts(bn: BayesNet, variables, cpts) -> BayesNet:
    """New network with the same name/properties but different variables and CPTs."""
    edges = [(p, c.child.name) for c in cpts for p in c.parent_names]
    return build_network(variables, edges, cpts, name=bn.name, properties=bn.properties)
