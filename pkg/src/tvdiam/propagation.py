"""Error-propagation bounds along junction-tree paths.

A perturbation of the marginal of a source clique reaches an output variable
through the chain of (starred) separators on the tree path between the two
cliques.  Each link contracts total variation by at most its CPT diameter,
so the product of link diameters (the *impact*) bounds the output deviation
per unit of source deviation, for perturbations that leave the chain CPTs
unchanged.

Two modes:

``exact``
    every chain CPT is built by exact inference and its diameter measured.
``bounded``
    every chain diameter is replaced by a bound assembled from the original
    CPT diameters only (marginalization never increases a diameter; a joint
    diameter is at most the sum of its chain-rule factors, capped at one).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CliqueNotFound, OutOfRange, TargetHasChildren, ValidationError
from .inference import JunctionTree, conditional_table, junction_tree
from .model import BayesNet
from .variation import upper_diameter

MODES = ("exact", "bounded")


def single_link_bound(d_plus: float, d_marginal: float) -> float:
    """Bound on ``d_V(p(y), p'(y))`` when ``P(Y|X)`` is shared and has diameter ``d_plus``."""
    for d in (d_plus, d_marginal):
        if not 0.0 <= d <= 1.0:
            raise OutOfRange(f"{d!r} outside [0, 1]")
    return d_plus * d_marginal


@dataclass(frozen=True)
class SeparatorChain:
    """Tree path between two cliques with its separators and starred separators.

    ``separators[t]`` sits between ``path[t]`` and ``path[t + 1]``;
    ``starred[t]`` drops every variable that reappears in a later separator.
    """

    path: tuple[int, ...]
    separators: tuple[tuple[str, ...], ...]
    starred: tuple[tuple[str, ...], ...]


def separator_chain(jt: JunctionTree, source, target) -> SeparatorChain:
    s, t = jt.find(source), jt.find(target)
    path = tuple(jt.path(s, t))
    seps = [jt.cliques[a] & jt.cliques[b] for a, b in zip(path, path[1:])]
    starred = []
    for k, sep in enumerate(seps):
        later = frozenset().union(*seps[k + 1:]) if k + 1 < len(seps) else frozenset()
        starred.append(sep - later)
    return SeparatorChain(path, tuple(jt.sorted_members(x) for x in seps),
                          tuple(jt.sorted_members(x) for x in starred))


@dataclass(frozen=True)
class ChainLink:
    """One chain CPT ``p(targets | givens)`` and its (exact or bounded) diameter."""

    targets: tuple[str, ...]
    givens: tuple[str, ...]
    diameter: float
    degenerate: bool = False
    zero_mass_rows: int = 0


@dataclass(frozen=True)
class ImpactChain:
    source: int
    target: str
    target_clique: int
    chain: SeparatorChain
    links: tuple[ChainLink, ...]
    terminal: ChainLink
    impact: float
    mode: str

    @property
    def flags(self) -> tuple[str, ...]:
        out = []
        if any(l.degenerate for l in self.links + (self.terminal,)):
            out.append("empty-starred-separator")
        if any(l.zero_mass_rows for l in self.links + (self.terminal,)):
            out.append("zero-mass-rows")
        return tuple(out)


def _supported_diameter(cpt) -> float:
    rows = np.delete(cpt.table, cpt.flagged_rows, axis=0) if cpt.flagged_rows else cpt.table
    return upper_diameter(rows).value if rows.shape[0] else 0.0


def bounded_diameter(bn: BayesNet, targets, givens) -> float:
    """Upper bound on the diameter of ``p(targets | givens)`` from original CPT diameters.

    Targets are peeled off in topological order; a target whose conditioning
    set holds none of its descendants contributes its own CPT diameter, any
    other contributes the trivial bound 1.
    """
    targets, givens = tuple(targets), tuple(givens)
    if not targets or not givens:
        return 0.0
    topo = {n: k for k, n in enumerate(bn.dag.topological_order())}
    cond = set(givens)
    total = 0.0
    for a in sorted(targets, key=topo.__getitem__):
        if cond & bn.dag.descendants(a):
            total += 1.0
        else:
            total += upper_diameter(bn.cpt(a)).value
        cond.add(a)
    return min(total, 1.0)


def _link(bn, targets, givens, mode, max_states) -> ChainLink:
    degenerate = not targets or not givens
    if degenerate:
        return ChainLink(targets, givens, 0.0, degenerate=True)
    if mode == "bounded":
        return ChainLink(targets, givens, bounded_diameter(bn, targets, givens))
    cpt = conditional_table(bn, targets, givens, max_states=max_states)
    return ChainLink(targets, givens, _supported_diameter(cpt), zero_mass_rows=len(cpt.flagged_rows))


def _target_clique(jt: JunctionTree, source: int, target: str) -> int:
    holders = jt.containing(target)
    if not holders:
        raise CliqueNotFound(f"no clique contains {target!r}")
    if source in holders:
        return source
    return min(holders, key=lambda c: (len(jt.path(source, c)), c))


def impact(bn: BayesNet, jt: JunctionTree, source, target: str, mode: str = "exact", *,
           allow_children: bool = False, max_states: int | None = None) -> ImpactChain:
    """Impact of the clique ``source`` on the output variable ``target``.

    Parameters
    ----------
    source : int, str or set of names
        Clique index, comma-separated member list, or member set.
    target : str
        Output variable; must have no children unless ``allow_children``.
    mode : {"exact", "bounded"}

    Returns
    -------
    ImpactChain
        ``impact`` is the product of the terminal diameter ``d+(P(target | S*_last))``
        and every link diameter ``d+(P(S*_k | S*_{k-1}))``.  When the source
        clique already contains the target the chain is empty and the impact is
        the diameter of the target's own CPT.  The target clique is the clique
        holding ``target`` nearest to the source.
    """
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    children = bn.children(target)
    if children and not allow_children:
        raise TargetHasChildren(target, children)
    s = jt.find(source)
    tc = _target_clique(jt, s, target)
    chain = separator_chain(jt, s, tc)
    if s == tc:
        own = bn.cpt(target)
        terminal = ChainLink((target,), own.parent_names, upper_diameter(own).value)
        links = ()
    else:
        star = chain.starred
        links = tuple(_link(bn, star[k], star[k - 1], mode, max_states) for k in range(1, len(star)))
        terminal = _link(bn, (target,), star[-1], mode, max_states)
    value = terminal.diameter
    for link in reversed(links):
        value *= link.diameter
    return ImpactChain(s, target, tc, chain, links, terminal, min(max(value, 0.0), 1.0), mode)


@dataclass(frozen=True)
class ImpactMap:
    target: str
    junction_tree: JunctionTree
    chains: tuple[ImpactChain, ...]
    mode: str

    @property
    def impacts(self) -> tuple[float, ...]:
        return tuple(c.impact for c in self.chains)

    def by_label(self) -> dict[str, float]:
        return {self.junction_tree.label(i): c.impact for i, c in enumerate(self.chains)}

    def monotonicity_violations(self, tol: float = 1e-12) -> list[tuple[int, int]]:
        """Pairs ``(i, k)`` where clique ``k`` lies between ``i`` and the target yet has a smaller impact."""
        bad = []
        for i, ch in enumerate(self.chains):
            for k in ch.chain.path[1:]:
                if ch.impact > self.chains[k].impact + tol:
                    bad.append((i, k))
        return bad


def impact_map(bn: BayesNet, target: str, mode: str = "exact", *, jt: JunctionTree | None = None,
               allow_children: bool = False, max_states: int | None = None) -> ImpactMap:
    """Impact of every clique of the junction tree on ``target``."""
    jt = jt or junction_tree(bn)
    chains = tuple(
        impact(bn, jt, i, target, mode, allow_children=allow_children, max_states=max_states)
        for i in range(len(jt))
    )
    return ImpactMap(target, jt, chains, mode)
