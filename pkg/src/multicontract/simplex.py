"""Small dense full-tableau simplex with Bland's rule.

Solves ``max c.y  s.t.  A y <= b, y >= 0`` with ``b >= 0``, so the slack basis
is feasible from the start and no phase one is needed. That is the shape of
every restricted primal built during column generation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SimplexError


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    duals: np.ndarray
    basis: list
    iterations: int
    tableau: np.ndarray


def solve_max(c, A, b, tol: float = 1e-9, max_iter: int | None = None) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    rows, cols = A.shape
    if (b < -tol).any():
        raise SimplexError("right-hand side must be non-negative for the slack start")
    if max_iter is None:
        max_iter = 100 * (rows + cols) + 1000

    T = np.zeros((rows + 1, cols + rows + 1))
    T[:rows, :cols] = A
    T[:rows, cols : cols + rows] = np.eye(rows)
    T[:rows, -1] = np.maximum(b, 0.0)
    T[-1, :cols] = -c
    basis = list(range(cols, cols + rows))

    it = 0
    while True:
        reduced = T[-1, :-1]
        entering = np.flatnonzero(reduced < -tol)
        if entering.size == 0:
            break
        if it >= max_iter:
            raise SimplexError(f"iteration budget of {max_iter} exhausted", basis)
        e = int(entering[0])  # Bland: lowest index
        column = T[:rows, e]
        candidates = np.flatnonzero(column > tol)
        if candidates.size == 0:
            raise SimplexError(f"problem is unbounded along column {e}", basis)
        ratios = T[candidates, -1] / column[candidates]
        best = ratios.min()
        tied = candidates[ratios <= best + tol * max(1.0, abs(best))]
        r = int(min(tied, key=lambda k: basis[k]))  # Bland: lowest basic index leaves
        T[r] /= T[r, e]
        factors = T[:, e].copy()
        factors[r] = 0.0
        T -= np.outer(factors, T[r])
        basis[r] = e
        it += 1

    x = np.zeros(cols + rows)
    x[basis] = T[:rows, -1]
    return SimplexResult(
        x=np.maximum(x[:cols], 0.0),
        objective=float(T[-1, -1]),
        duals=np.maximum(T[-1, cols : cols + rows], 0.0),
        basis=basis,
        iterations=it,
        tableau=T,
    )


def format_tableau(result: SimplexResult, row_names=None, col_names=None) -> str:
    """Plain-text dump of a final tableau, one row per line."""
    T = result.tableau
    rows = T.shape[0] - 1
    cols = T.shape[1] - 1
    if col_names is None:
        col_names = [f"v{k}" for k in range(cols)]
    if row_names is None:
        row_names = [f"r{k}" for k in range(rows)]
    width = 11
    head = " " * 10 + "".join(f"{name[:width - 1]:>{width}}" for name in list(col_names) + ["rhs"])
    lines = [head]
    for k in range(rows):
        label = f"{row_names[k][:8]:<8}  "
        lines.append(label + "".join(f"{v:>{width}.4g}" for v in T[k]))
    lines.append(f"{'obj':<10}" + "".join(f"{v:>{width}.4g}" for v in T[-1]))
    lines.append(f"basis: {result.basis}  iterations: {result.iterations}")
    return "\n".join(lines)
