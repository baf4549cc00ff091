"""Approximate demand queries for the capped function ``min(f(S), x)``.

Exact capped demand is NP-hard even for additive ``f``. Two approximations
are offered:

* :func:`capped_demand` reduces to ordinary demand queries (additive / XOS),
  bisecting on a price multiplier and then splitting an over-cap demand set
  into blocks whose value sits just under the cap.
* :func:`capped_demand_submodular` needs value queries only and runs the
  distorted greedy on ``min(f(S), x) - p(S)`` (coverage / budget-additive).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import PreconditionError, UnsupportedOracle
from .instance import DEMAND_CLASSES, SUBMODULAR_CLASSES, SuccessFunction, singleton_values
from .oracles import demand, price_vector, value

GAMMA_FLOOR = 1e-12
PREFERENCE_MARGIN = 1e-12
SINGLETON_SLACK = 1e-12


@dataclass(frozen=True)
class CappedQuery:
    f: SuccessFunction
    cap: float
    delta: float
    prices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "prices", price_vector(self.prices))

    def check(self) -> None:
        if not self.cap > 0:
            raise PreconditionError(f"cap must be positive, got {self.cap}")
        if not 0 < self.delta < 1:
            raise PreconditionError(f"delta must lie in (0, 1), got {self.delta}")
        if self.prices.shape != (self.f.n_agents,):
            raise PreconditionError(f"expected {self.f.n_agents} prices, got shape {self.prices.shape}")
        finite = np.isfinite(self.prices)
        limit = self.delta * self.cap * (1 + SINGLETON_SLACK)
        too_big = np.flatnonzero(finite & (singleton_values(self.f) > limit))
        if too_big.size:
            raise PreconditionError(
                f"agent {int(too_big[0])} has singleton value above delta * cap = {self.delta * self.cap}"
            )


@dataclass(frozen=True)
class BinarySearchState:
    gamma1: float
    gamma2: float
    S1: frozenset
    S2: frozenset


@dataclass
class CappedDemandTrace:
    """Result of :func:`capped_demand_trace` with the intermediate objects exposed for checks."""

    result: frozenset
    returned_demand: bool
    state: Optional[BinarySearchState] = None
    blocks: list = field(default_factory=list)


def _gain(f, S, p) -> float:
    return value(f, S) - float(sum(p[i] for i in S))


def _scaled_prices(p: np.ndarray, gamma: float) -> np.ndarray:
    # zero prices stay zero at any gamma; positive prices blow up as gamma -> 0
    with np.errstate(divide="ignore"):
        return np.where(p > 0, p / gamma, 0.0)


def partition_blocks(f: SuccessFunction, S2, cap: float, delta: float) -> list:
    """Split ``S2`` (ascending agent order) into blocks of value at least ``(1 - delta) * cap``.

    Stops as soon as the block values add up to ``f(S2)``; only the last block
    may fall short of the threshold.
    """
    target = value(f, S2)
    blocks = [set()]
    total_closed = 0.0
    for i in sorted(S2):
        blocks[-1].add(i)
        current = value(f, blocks[-1])
        if total_closed + current >= target:
            break
        if current >= (1 - delta) * cap:
            total_closed += current
            blocks.append(set())
    return [frozenset(b) for b in blocks if b]


def capped_demand_trace(query: CappedQuery) -> CappedDemandTrace:
    query.check()
    f, x, delta = query.f, query.cap, query.delta
    if not isinstance(f, DEMAND_CLASSES):
        raise UnsupportedOracle(f"{type(f).__name__} has no demand oracle; use capped_demand_submodular")
    p = query.prices
    S2 = demand(f, p)
    if value(f, S2) <= x:
        return CappedDemandTrace(S2, returned_demand=True)

    S1: frozenset = frozenset()
    g1, g2 = 0.0, 1.0
    while g2 - g1 >= delta and g2 - g1 >= GAMMA_FLOOR:
        mid = (g1 + g2) / 2
        S = demand(f, _scaled_prices(p, mid))
        if value(f, S) > x:
            S2, g2 = S, mid
        else:
            S1, g1 = S, mid
    state = BinarySearchState(g1, g2, S1, S2)

    blocks = partition_blocks(f, S2, x, delta)
    best_block = blocks[0]
    best_gain = _gain(f, best_block, p)
    for U in blocks[1:]:
        g = _gain(f, U, p)
        if g > best_gain + PREFERENCE_MARGIN:
            best_block, best_gain = U, g
    result = S1
    if best_gain > _gain(f, S1, p) + PREFERENCE_MARGIN:
        result = best_block
    return CappedDemandTrace(result, returned_demand=False, state=state, blocks=blocks)


def capped_demand(query: CappedQuery) -> frozenset:
    """Set ``S`` with ``min(f(S),x) - p(S) >= max_T(min(f(T),x) - p(T)) / (1 + 1/(1-delta)) - delta*x``.

    Requires every finite-priced agent to satisfy ``f({i}) <= delta * x``.
    Infinite-priced agents are never demanded.
    """
    return capped_demand_trace(query).result


def capped_demand_submodular(f: SuccessFunction, cap: float, prices) -> frozenset:
    """Distorted greedy for ``g(S) - p(S)`` with ``g(S) = min(f(S), cap)``.

    Iteration k (1-based) adds the agent maximizing
    ``(1 - 1/n)**(n - k) * g(i | S) - p_i`` when that quantity is positive,
    which guarantees ``g(S) - p(S) >= (1 - 1/e) g(T) - p(T)`` for every ``T``.
    """
    if not isinstance(f, SUBMODULAR_CLASSES):
        raise UnsupportedOracle(f"{type(f).__name__} is not a submodular class")
    if not cap > 0:
        raise PreconditionError(f"cap must be positive, got {cap}")
    p = price_vector(prices)
    n = f.n_agents
    candidates = [i for i in range(n) if math.isfinite(p[i])]
    S: set = set()
    current = 0.0
    for k in range(1, n + 1):
        if not candidates:
            break
        weight = (1 - 1 / n) ** (n - k)
        best, best_score, best_value = None, 0.0, current
        for i in candidates:
            v = min(value(f, S | {i}), cap)
            score = weight * (v - current) - p[i]
            if score > best_score:
                best, best_score, best_value = i, score, v
        if best is not None:
            S.add(best)
            candidates.remove(best)
            current = best_value
    return frozenset(S)
