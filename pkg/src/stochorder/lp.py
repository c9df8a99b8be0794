"""Small dense simplex solver.

Solves  minimize c @ x  subject to  G @ x <= h,  x >= 0  with h >= 0, so the
slack basis is feasible from the start and no phase one is needed.  Bland's
smallest-index rule picks entering and leaving variables, which rules out
cycling on the heavily degenerate problems produced by lattice constraints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPResult", "LPFailure", "simplex_min"]


class LPFailure(RuntimeError):
    """The simplex method did not reach an optimal basis."""


@dataclass(frozen=True)
class LPResult:
    status: str
    x: np.ndarray
    value: float
    iterations: int


def simplex_min(c, G, h, max_iter: int = 200_000, eps: float = 1e-11) -> LPResult:
    """Minimize ``c @ x`` over ``G @ x <= h``, ``x >= 0`` (requires ``h >= 0``).

    Returns status ``"optimal"`` or ``"unbounded"``; raises ``LPFailure`` when
    the iteration budget runs out.
    """
    c = np.asarray(c, dtype=float)
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float)
    m, n = G.shape
    if c.shape != (n,) or h.shape != (m,):
        raise ValueError("inconsistent LP dimensions")
    if np.any(h < 0):
        raise ValueError("right-hand side must be nonnegative")

    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = G
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = h
    T[m, :n] = c
    basis = np.arange(n, n + m)

    for it in range(max_iter):
        reduced = T[m, :-1]
        candidates = np.flatnonzero(reduced < -eps)
        if candidates.size == 0:
            x = np.zeros(n + m)
            x[basis] = T[:m, -1]
            return LPResult("optimal", x[:n], float(c @ x[:n]), it)
        j = int(candidates[0])
        col = T[:m, j]
        rows = np.flatnonzero(col > eps)
        if rows.size == 0:
            return LPResult("unbounded", np.zeros(n), -np.inf, it)
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + eps * (1 + abs(best))]
        r = int(ties[np.argmin(basis[ties])])

        T[r] /= T[r, j]
        factor = T[:, j].copy()
        factor[r] = 0.0
        T -= np.outer(factor, T[r])
        basis[r] = j
    raise LPFailure(f"no optimal basis after {max_iter} pivots")
