"""Bundled example networks."""
from __future__ import annotations

from importlib import resources

from .io.bif import parse_bif
from .model import BayesNet, DiscreteVariable, make_network

_LEVELS3 = ("high", "medium", "low")

# Rows ordered (X_j, X_k) with X_j most significant.  The (high, medium) row
# sums to 1.1 as printed; it is kept verbatim so hand-computed indices hold.
CSI_ROWS = (
    (0.5, 0.3, 0.2), (0.4, 0.2, 0.5), (0.3, 0.1, 0.6),
    (0.5, 0.3, 0.2), (0.3, 0.5, 0.2), (0.2, 0.4, 0.4),
    (0.5, 0.3, 0.2), (0.2, 0.2, 0.6), (0.2, 0.2, 0.6),
)


def bundled_path(name: str):
    """Filesystem path of a bundled data file such as ``"asia.bif"``."""
    return resources.files("tvdiam") / "data" / name


def _load(name: str) -> BayesNet:
    return parse_bif(bundled_path(name).read_text(encoding="utf-8")).network


def asia() -> BayesNet:
    """The eight-node chest clinic network with its standard CPTs."""
    return _load("asia.bif")


def growth() -> BayesNet:
    """GROWTH with parents EMP12 (ordinal, three levels) and INPD."""
    return _load("growth.bif")


def csi_example(*, strict: bool = False) -> BayesNet:
    """Three-level child ``Xi`` with parents ``Xj`` and ``Xk``.

    The table embeds a context-specific independence (``Xk = high``) and a
    partial independence (``Xj = low`` over ``{medium, low}``).  One row does
    not sum to one, so the network is built with a relaxed tolerance and no
    renormalization unless ``strict`` is set, in which case validation fails.
    """
    xi, xj, xk = (DiscreteVariable(n, _LEVELS3) for n in ("Xi", "Xj", "Xk"))
    uniform = [[1 / 3] * 3]
    tables = {"Xj": ((), uniform), "Xk": ((), uniform), "Xi": (("Xj", "Xk"), CSI_ROWS)}
    if strict:
        return make_network((xj, xk, xi), tables, name="csi_example")
    return make_network((xj, xk, xi), tables, name="csi_example", tol=0.2, renormalize=False)
