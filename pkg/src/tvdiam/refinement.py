"""Level amalgamation and asymmetric (context-specific / partial) independence indices."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BadContext, NonConsecutiveOrdinal, NotAParent, TooFewLevels, ValidationError
from .model import BayesNet, Cpt, DiscreteVariable, ParentAssignment, replace_cpts, sub_cpt
from .sensitivity import contexts
from .variation import lower_diameter, upper_diameter


# -- amalgamation -----------------------------------------------------------

@dataclass(frozen=True)
class ChildDiameter:
    child: str
    before: float
    after: float


@dataclass(frozen=True)
class AmalgamationReport:
    """Outcome of merging two levels of ``variable``.

    ``own_before``/``own_after`` are the diameters of the variable's own CPT,
    whose columns for the two levels were summed.
    """

    variable: str
    merged: tuple[str, str]
    merged_level: str
    network: BayesNet = field(repr=False)
    children: tuple[ChildDiameter, ...]
    own_before: float
    own_after: float


def _level_pair(var: DiscreteVariable, a, b) -> tuple[int, int]:
    if var.cardinality < 3:
        raise TooFewLevels(f"{var.name!r} has only {var.cardinality} levels")
    ia, ib = sorted((var.index(a), var.index(b)))
    if ia == ib:
        raise ValidationError("cannot merge a level with itself")
    if var.ordinal and ib - ia != 1:
        raise NonConsecutiveOrdinal(
            f"{var.name!r} is ordinal: only consecutive levels may be merged "
            f"({var.levels[ia]!r} and {var.levels[ib]!r} are not)"
        )
    return ia, ib


def _merge_axis(arr: np.ndarray, axis: int, ia: int, ib: int, how: str) -> np.ndarray:
    a = np.take(arr, ia, axis=axis)
    b = np.take(arr, ib, axis=axis)
    merged = a + b if how == "sum" else (a + b) / 2.0
    keep = [k for k in range(arr.shape[axis]) if k != ib]
    out = np.take(arr, keep, axis=axis).copy()
    idx = [slice(None)] * arr.ndim
    idx[axis] = ia
    out[tuple(idx)] = merged
    return out


def amalgamate_levels(bn: BayesNet, variable: str, level_a, level_b) -> AmalgamationReport:
    """Merge two levels of ``variable`` and report the effect on child diameters.

    The variable's own probabilities for the two levels are summed; in every
    child CPT the two rows that differ only in this variable are replaced by
    their unweighted average.  The merged level is named ``"a+b"`` (in
    declaration order) and takes the position of the first of the two.
    """
    var = bn.variable(variable)
    ia, ib = _level_pair(var, level_a, level_b)
    merged_name = f"{var.levels[ia]}+{var.levels[ib]}"
    levels = [l for k, l in enumerate(var.levels) if k != ib]
    levels[ia] = merged_name
    new_var = DiscreteVariable(var.name, levels, var.ordinal, var.properties)

    variables = [new_var if v.name == variable else v for v in bn.variables]
    lookup = {v.name: v for v in variables}
    cpts, report = [], []
    for c in bn.cpts:
        tensor = c.tensor()
        if c.child.name == variable:
            tensor = _merge_axis(tensor, tensor.ndim - 1, ia, ib, "sum")
        if variable in c.parent_names:
            tensor = _merge_axis(tensor, c.parent_names.index(variable), ia, ib, "mean")
        parents = [lookup[p] for p in c.parent_names]
        child = lookup[c.child.name]
        rows = tensor.reshape(-1, child.cardinality)
        new = Cpt(child, parents, rows, tol=c.tol, renormalize=False, properties=c.properties)
        if variable in c.parent_names:
            report.append(ChildDiameter(c.child.name, upper_diameter(c).value, upper_diameter(new).value))
        cpts.append(new)
    network = replace_cpts(bn, variables, cpts)
    return AmalgamationReport(
        variable=variable,
        merged=(var.levels[ia], var.levels[ib]),
        merged_level=merged_name,
        network=network,
        children=tuple(report),
        own_before=upper_diameter(bn.cpt(variable)).value,
        own_after=upper_diameter(network.cpt(variable)).value,
    )


@dataclass(frozen=True)
class AmalgamationCandidate:
    """``score``: largest distance between the two rows to be averaged, over all children and contexts.

    ``diameter_drop``: largest decrease of a child diameter if the pair were merged.
    """

    levels: tuple[str, str]
    score: float
    diameter_drop: float


def suggest_amalgamation(bn: BayesNet, variable: str) -> list[AmalgamationCandidate]:
    """Candidate level pairs for ``variable``, closest (smallest score) first."""
    var = bn.variable(variable)
    if var.cardinality < 3:
        raise TooFewLevels(f"{var.name!r} has only {var.cardinality} levels")
    if var.ordinal:
        pairs = [(k, k + 1) for k in range(var.cardinality - 1)]
    else:
        pairs = list(itertools.combinations(range(var.cardinality), 2))
    children = [bn.cpt(c) for c in bn.children(variable)]
    out = []
    for ia, ib in pairs:
        score = 0.0
        for c in children:
            t = c.tensor()
            axis = c.parent_names.index(variable)
            diff = np.take(t, ia, axis=axis) - np.take(t, ib, axis=axis)
            per_row = 0.5 * np.abs(diff.reshape(-1, c.child.cardinality)).sum(axis=1)
            score = max(score, float(per_row.max()))
        rep = amalgamate_levels(bn, variable, ia, ib)
        drop = max((ch.before - ch.after for ch in rep.children), default=0.0)
        out.append((score, ia, ib, AmalgamationCandidate((var.levels[ia], var.levels[ib]), score, drop)))
    out.sort(key=lambda t: t[:3])
    return [t[3] for t in out]


# -- asymmetry indices ------------------------------------------------------

def _context_cpt(bn: BayesNet, node: str, varying: str, context) -> Cpt:
    cpt = bn.cpt(node)
    if varying not in cpt.parent_names:
        raise NotAParent(varying, node)
    context = dict(context or {})
    if varying in context:
        raise BadContext(f"context must not fix the varying parent {varying!r}")
    pa = ParentAssignment.of(cpt, context)
    expected = set(cpt.parent_names) - {varying}
    if set(pa.as_dict()) != expected:
        missing = sorted(expected - set(pa.as_dict()))
        raise BadContext(f"context for {node!r} must assign exactly the other parents; missing {missing}")
    return sub_cpt(cpt, context)


def csi_index(bn: BayesNet, node: str, varying: str, context=None) -> float:
    """Context-specific independence index: upper diameter of the sub-CPT where only ``varying`` changes."""
    return upper_diameter(_context_cpt(bn, node, varying, context)).value


def partial_index(bn: BayesNet, node: str, varying: str, context=None) -> tuple[float, tuple[str, str]]:
    """Partial independence index (lower diameter) and the two closest levels of ``varying``."""
    sub = _context_cpt(bn, node, varying, context)
    d = lower_diameter(sub)
    levels = bn.variable(varying).levels
    return d.value, (levels[d.witness[0]], levels[d.witness[1]])


@dataclass(frozen=True)
class AsymmetryFinding:
    node: str
    varying: str
    context: dict = field(hash=False)
    csi_index: float
    partial_index: float
    partial_witness: tuple[str, str]
    csi: bool
    partial: bool

    @property
    def index(self) -> float:
        """The smaller of the indices that fell under the threshold."""
        vals = ([self.csi_index] if self.csi else []) + ([self.partial_index] if self.partial else [])
        return min(vals)


def asymmetry_scan(bn: BayesNet, node: str, threshold: float) -> list[AsymmetryFinding]:
    """Every (parent, context) of ``node`` whose CSI or partial index is at most ``threshold``.

    Partial findings are only reported for parents with three or more levels,
    since for binary parents the two indices coincide.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValidationError(f"threshold must lie in [0, 1], got {threshold!r}")
    out = []
    parents = bn.parents(node)
    for order, j in enumerate(parents):
        for k, ctx in enumerate(contexts(bn, node, j)):
            sub = _context_cpt(bn, node, j, ctx)
            up = upper_diameter(sub).value
            lo = lower_diameter(sub)
            levels = bn.variable(j).levels
            is_csi = up <= threshold
            is_partial = len(levels) >= 3 and lo.value <= threshold
            if is_csi or is_partial:
                f = AsymmetryFinding(node, j, ctx, up, lo.value,
                                     (levels[lo.witness[0]], levels[lo.witness[1]]), is_csi, is_partial)
                out.append((f.index, order, k, f))
    out.sort(key=lambda t: t[:3])
    return [t[3] for t in out]
