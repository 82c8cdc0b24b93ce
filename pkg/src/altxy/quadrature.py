"""Gauss-Legendre quadrature over the reduced momentum zone [0, pi/2].

Integrands are vectorized callables f(phi_array) -> array whose leading axis
matches phi.  Adaptive integration doubles the node count until two
successive estimates agree; reductions use numpy sums on fixed-size arrays,
so results are deterministic for a given node layout.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError

MAX_NODES = 65536


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of n-point Gauss-Legendre on [a, b]."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def panel_nodes(n: int, edges: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre on each panel between consecutive edges."""
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        x, w = gauss_legendre(n, a, b)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    edges: Sequence[float],
    tol: float = 1e-10,
    start: int = 256,
    cap: int = MAX_NODES,
) -> np.ndarray:
    """Integrate f over the panels defined by `edges`, doubling nodes to tol.

    Returns the converged estimate (scalar or array over trailing axes of f).
    Raises ConvergenceError carrying the last estimate and the final change
    if the per-panel node count reaches `cap` without convergence.
    """
    n = start
    x, w = panel_nodes(n, edges)
    est = np.tensordot(w, np.asarray(f(x)), axes=(0, 0))
    while True:
        n *= 2
        if n > cap:
            raise ConvergenceError(
                f"quadrature did not converge at {cap} nodes/panel "
                f"(last change {err:.3e})",
                estimate=est,
                bound=err,
            )
        x, w = panel_nodes(n, edges)
        new = np.tensordot(w, np.asarray(f(x)), axes=(0, 0))
        err = float(np.max(np.abs(new - est)))
        est = new
        if err < tol:
            return est
