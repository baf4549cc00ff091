"""Best single-agent-per-project allocation via maximum-weight bipartite matching.

An edge (i, j) is worth ``max(f_j({i}) - c_ij, 0)``, which is exactly the
revenue of project j when agent i works on it alone. A maximum-weight matching
therefore gives the best allocation with at most one agent per project.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .instance import Allocation, Instance

_TIE_TOL = 1e-12


@dataclass(frozen=True)
class WeightedBipartiteGraph:
    weights: np.ndarray  # n_agents x n_projects, non-negative

    def total(self, allocation: Allocation) -> float:
        return float(sum(self.weights[i, j] for i, j in enumerate(allocation.assignment) if j is not None))


def build_graph(instance: Instance) -> WeightedBipartiteGraph:
    w = np.maximum(instance.singleton_matrix() - instance.cost_matrix, 0.0)
    return WeightedBipartiteGraph(w)


def _optimum(w: np.ndarray) -> float:
    if w.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(w, maximize=True)
    return float(w[rows, cols].sum())


def max_weight_matching(g: WeightedBipartiteGraph) -> Allocation:
    """Maximum-weight matching, lexicographically smallest among the optima.

    Agents are fixed one at a time to the smallest project that still admits an
    optimal completion; an agent that fits nowhere stays unassigned. Zero-weight
    edges are never used.
    """
    w = np.asarray(g.weights, dtype=float)
    n, m = w.shape
    target = _optimum(w)
    tol = _TIE_TOL * max(1.0, target)

    assignment: list = [None] * n
    gained = 0.0
    free = list(range(m))
    for i in range(n):
        for j in free:
            if w[i, j] <= 0:
                continue
            rest = [k for k in free if k != j]
            completion = _optimum(w[np.ix_(range(i + 1, n), rest)])
            if gained + w[i, j] + completion >= target - tol:
                assignment[i] = j
                gained += w[i, j]
                free = rest
                break
    return Allocation(tuple(assignment))


def dominant_matching(instance: Instance) -> Allocation:
    """Allocation ``S-`` approximating the revenue of projects with a dominant agent."""
    return max_weight_matching(build_graph(instance))
