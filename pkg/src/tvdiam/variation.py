"""Total variation distance and the upper/lower diameter of stochastic matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DisjointSupports,
    EmptyMatrix,
    IdenticalInputs,
    LengthMismatch,
    NotAPmf,
    OutOfRange,
    SingleRow,
)
from .model import ROW_TOL, Cpt


@dataclass(frozen=True)
class DiameterResult:
    """Extremal pairwise row distance and the lexicographically first pair attaining it."""

    value: float
    witness: tuple[int, int]

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class TvDecomposition:
    beta: float
    common: np.ndarray
    residual_p: np.ndarray
    residual_q: np.ndarray


def _as_pmf(p, tol: float) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise NotAPmf("pmf must be a non-empty vector")
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise NotAPmf("pmf entries must be finite and non-negative")
    if abs(arr.sum() - 1.0) > tol:
        raise NotAPmf(f"pmf sums to {arr.sum()!r}")
    return arr


def _pair(p, q, tol):
    p, q = _as_pmf(p, tol), _as_pmf(q, tol)
    if p.shape != q.shape:
        raise LengthMismatch(f"pmfs of length {p.size} and {q.size}")
    return p, q


def _tv(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())


def tv_distance(p, q, *, tol: float = ROW_TOL) -> float:
    """Total variation distance ``0.5 * sum(|p - q|)`` between two pmfs."""
    p, q = _pair(p, q, tol)
    return _tv(p, q)


def _rows(m) -> np.ndarray:
    arr = m.table if isinstance(m, Cpt) else np.asarray(m, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise EmptyMatrix("stochastic matrix has no rows")
    return arr


def _extreme_pair(rows: np.ndarray, largest: bool) -> tuple[int, int]:
    best, best_pair = None, (0, 1)
    for i in range(rows.shape[0] - 1):
        d = 0.5 * np.abs(rows[i + 1:] - rows[i]).sum(axis=1)
        k = int(np.argmax(d) if largest else np.argmin(d))
        v = d[k]
        if best is None or (v > best if largest else v < best):
            best, best_pair = v, (i, i + 1 + k)
    return best_pair


def upper_diameter(m) -> DiameterResult:
    """Largest total variation distance between two rows of ``m``.

    Parameters
    ----------
    m : Cpt or array_like
        A stochastic matrix (rows are pmfs).

    Returns
    -------
    DiameterResult
        ``value`` is 0 for a single-row matrix, with witness ``(0, 0)``.
    """
    rows = _rows(m)
    if rows.shape[0] == 1:
        return DiameterResult(0.0, (0, 0))
    i, j = _extreme_pair(rows, largest=True)
    return DiameterResult(_tv(rows[i], rows[j]), (i, j))


def lower_diameter(m) -> DiameterResult:
    """Smallest total variation distance between two distinct rows of ``m``."""
    rows = _rows(m)
    if rows.shape[0] < 2:
        raise SingleRow("lower diameter needs at least two rows")
    i, j = _extreme_pair(rows, largest=False)
    return DiameterResult(_tv(rows[i], rows[j]), (i, j))


def tv_decompose(p, q, *, tol: float = ROW_TOL) -> TvDecomposition:
    """Split ``p`` and ``q`` into their shared part and two residuals.

    With ``beta = 1 - tv_distance(p, q)``, ``p == beta*common + (1-beta)*residual_p``
    and likewise for ``q``.

    Raises
    ------
    IdenticalInputs
        ``beta == 1``: the residuals would divide by zero.
    DisjointSupports
        ``beta == 0``: the common part would divide by zero.
    """
    p, q = _pair(p, q, tol)
    low = np.minimum(p, q)
    beta = float(low.sum())
    if beta >= 1.0 or np.array_equal(p, q):
        raise IdenticalInputs("pmfs are identical")
    if beta <= 0.0:
        raise DisjointSupports("pmfs have disjoint supports")
    return TvDecomposition(
        beta=beta,
        common=low / beta,
        residual_p=(p - low) / (1.0 - beta),
        residual_q=(q - low) / (1.0 - beta),
    )


def joint_diameter_bound(d_y_given_xz: float, d_z_given_x: float) -> float:
    """Upper bound on the diameter of ``P(Y,Z | X)`` from its two chain-rule factors."""
    for d in (d_y_given_xz, d_z_given_x):
        if not 0.0 <= d <= 1.0:
            raise OutOfRange(f"diameter {d!r} outside [0, 1]")
    return min(d_y_given_xz + d_z_given_x, 1.0)
