"""Full (unrestarted) GMRES in a diagonally weighted inner product."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class GmresResult:
    x: np.ndarray
    iterations: int
    converged: bool
    residuals: list[float] = field(default_factory=list)
    breakdown: bool = False


def gmres(
    matvec: Callable[[np.ndarray], np.ndarray],
    b: np.ndarray,
    weights: np.ndarray | None = None,
    tol: float = 1e-10,
    maxiter: int = 3000,
) -> GmresResult:
    """Solve A x = b from x0 = 0 until ||r|| <= tol*||b|| in the weighted norm.

    ``residuals`` holds the (monotone) residual norm estimates, starting with
    ||b||. If the iteration cap is hit the last, hence best, iterate is returned.
    Orthogonalisation is classical Gram-Schmidt applied twice.
    """
    b = np.asarray(b, dtype=float)
    n = b.size
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    beta = float(np.sqrt(np.dot(w * b, b)))
    res = GmresResult(np.zeros(n), 0, beta == 0.0, [beta])
    if beta == 0.0:
        return res
    target = tol * beta
    m = min(maxiter, n)
    V = np.empty((min(m, 64) + 1, n))
    H = np.zeros((m + 1, m))
    cs, sn = np.zeros(m), np.zeros(m)
    g = np.zeros(m + 1)
    g[0] = beta
    V[0] = b / beta
    j = 0
    while j < m:
        if j + 1 >= V.shape[0]:
            V = np.concatenate([V, np.empty((min(V.shape[0], m + 1 - V.shape[0]), n))])
        v = np.array(matvec(V[j]), dtype=float)  # copy: matvec may return its input
        for _ in range(2):
            h = V[: j + 1] @ (w * v)
            v -= h @ V[: j + 1]
            H[: j + 1, j] += h
        hn = float(np.sqrt(np.dot(w * v, v)))
        H[j + 1, j] = hn
        for i in range(j):
            t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
            H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
            H[i, j] = t
        rho = np.hypot(H[j, j], H[j + 1, j])
        cs[j], sn[j] = H[j, j] / rho, H[j + 1, j] / rho
        H[j, j] = rho
        H[j + 1, j] = 0.0
        g[j + 1] = -sn[j] * g[j]
        g[j] = cs[j] * g[j]
        j += 1
        res.residuals.append(abs(g[j]))
        if abs(g[j]) <= target:
            res.converged = True
            break
        if hn <= 1e-14 * beta:
            res.breakdown = True
            logger.warning("GMRES breakdown after %d iterations", j)
            break
        V[j] = v / hn
    y = _back_substitute(H[:j, :j], g[:j])
    res.x = y @ V[:j]
    res.iterations = j
    return res


def _back_substitute(R: np.ndarray, g: np.ndarray) -> np.ndarray:
    y = np.zeros_like(g)
    for i in range(len(g) - 1, -1, -1):
        y[i] = (g[i] - R[i, i + 1 :] @ y[i + 1 :]) / R[i, i]
    return y
