"""Seeded random instances for tests and benchmarks.

Values are drawn log-uniformly so singleton values span several orders of
magnitude, which is what makes both the dominant-agent and the many-small-agents
regimes show up on small instances.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import XOS, Additive, BudgetAdditive, Coverage, Instance

CLASSES = ("additive", "budget_additive", "coverage", "xos")
COST_REGIMES = ("zero", "low", "random")
LOG_RANGE = (-3.0, 0.0)  # log10 bounds of raw values


@dataclass(frozen=True)
class GenSpec:
    n: int
    m: int
    function_class: str = "xos"
    cost_regime: str = "random"
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if self.function_class not in CLASSES:
            raise ValueError(f"unknown function class {self.function_class!r}; choose from {CLASSES}")
        if self.cost_regime not in COST_REGIMES:
            raise ValueError(f"unknown cost regime {self.cost_regime!r}; choose from {COST_REGIMES}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def _log_uniform(rng: np.random.Generator, size) -> np.ndarray:
    return 10.0 ** rng.uniform(*LOG_RANGE, size=size)


def _scaled(raw: np.ndarray, total: float) -> list:
    return [float(v) for v in raw * (total / raw.sum())]


def random_function(rng: np.random.Generator, kind: str, n: int):
    if kind == "additive":
        return Additive(_scaled(_log_uniform(rng, n), rng.uniform(0.2, 1.0)))
    if kind == "budget_additive":
        values = _scaled(_log_uniform(rng, n), rng.uniform(0.5, 1.5))
        return BudgetAdditive(values, float(rng.uniform(0.2, 1.0)))
    if kind == "coverage":
        k = 2 * n
        weights = _scaled(_log_uniform(rng, k), rng.uniform(0.2, 1.0))
        covers = []
        for _ in range(n):
            members = np.flatnonzero(rng.random(k) < 0.3)
            if members.size == 0:
                members = np.array([rng.integers(k)])
            covers.append([int(e) for e in members])
        return Coverage(weights, covers)
    if kind == "xos":
        clauses = [_scaled(_log_uniform(rng, n), rng.uniform(0.2, 1.0)) for _ in range(int(rng.integers(1, 4)))]
        return XOS(clauses)
    raise ValueError(f"unknown function class {kind!r}")


def random_costs(rng: np.random.Generator, singles: np.ndarray, regime: str) -> np.ndarray:
    if regime == "zero":
        return np.zeros_like(singles)
    if regime == "low":
        return rng.uniform(0.0, 0.1 * float(singles.mean()), size=singles.shape)
    if regime == "random":
        return rng.uniform(0.0, float(singles.max()), size=singles.shape)
    raise ValueError(f"unknown cost regime {regime!r}")


def generate(spec: GenSpec) -> Instance:
    rng = np.random.default_rng(spec.seed)
    functions = [random_function(rng, spec.function_class, spec.n) for _ in range(spec.m)]
    singles = np.column_stack([f._singletons() for f in functions])
    costs = random_costs(rng, singles, spec.cost_regime)
    return Instance(spec.n, spec.m, [[float(c) for c in row] for row in costs], functions)
