"""Brute-force reference implementations used as test oracles.

Nothing here calls into the library's inference or variation code: joints are
built by enumerating every assignment, and trails come from plain path search.
"""
from __future__ import annotations

import itertools
import math

import networkx as nx
import numpy as np


def tv(p, q) -> float:
    return 0.5 * math.fsum(abs(a - b) for a, b in zip(p, q))


def diameter(rows) -> float:
    rows = [list(r) for r in rows]
    if len(rows) < 2:
        return 0.0
    return max(tv(a, b) for a, b in itertools.combinations(rows, 2))


def full_joint(bn) -> np.ndarray:
    """Joint pmf with one axis per variable in declaration order."""
    names = bn.names
    cards = [bn.variable(n).cardinality for n in names]
    pos = {n: i for i, n in enumerate(names)}
    joint = np.zeros(cards)
    for state in itertools.product(*(range(k) for k in cards)):
        prob = 1.0
        for n in names:
            cpt = bn.cpt(n)
            row = 0
            for p in cpt.parents:
                row = row * p.cardinality + state[pos[p.name]]
            prob *= cpt.table[row, state[pos[n]]]
        joint[state] = prob
    return joint


def marginal(bn, joint, scope) -> np.ndarray:
    names = bn.names
    keep = [names.index(s) for s in scope]
    drop = tuple(i for i in range(len(names)) if i not in keep)
    m = joint.sum(axis=drop)
    remaining = sorted(keep)
    return np.transpose(m, [remaining.index(k) for k in keep])


def conditional(bn, joint, targets, givens) -> np.ndarray:
    """Rows over ``givens`` (mixed radix), columns over ``targets``; zero-mass rows uniform."""
    m = marginal(bn, joint, list(givens) + list(targets))
    n_rows = int(np.prod([bn.variable(g).cardinality for g in givens], dtype=int))
    rows = m.reshape(n_rows, -1)
    out = np.empty_like(rows)
    for r in range(n_rows):
        s = rows[r].sum()
        out[r] = rows[r] / s if s > 0 else 1.0 / rows.shape[1]
    return out


def mutual_information(bn, joint, x, y) -> float:
    pxy = marginal(bn, joint, [x, y])
    px, py = pxy.sum(axis=1), pxy.sum(axis=0)
    total = 0.0
    for i in range(pxy.shape[0]):
        for j in range(pxy.shape[1]):
            if pxy[i, j] > 0:
                total += pxy[i, j] * math.log(pxy[i, j] / (px[i] * py[j]))
    return total


def active_trails(nodes, edges, a, b) -> set[tuple[str, ...]]:
    """Simple undirected paths a..b without an interior collider."""
    directed = set(edges)
    g = nx.Graph()
    g.add_nodes_from(nodes)
    g.add_edges_from(edges)
    out = set()
    if a == b:
        return out
    for path in nx.all_simple_paths(g, a, b):
        ok = True
        for u, v, w in zip(path, path[1:], path[2:]):
            if (u, v) in directed and (w, v) in directed:
                ok = False
                break
        if ok:
            out.add(tuple(path))
    return out
