"""Value, marginal and demand queries on explicit success functions."""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import UnsupportedOracle
from .instance import XOS, Additive, SuccessFunction


def _index(f: SuccessFunction, S: Iterable[int]) -> np.ndarray:
    idx = np.fromiter(S, dtype=np.intp)
    if idx.size and (idx.min() < 0 or idx.max() >= f.n_agents):
        raise IndexError(f"agent index out of range for a function over {f.n_agents} agents")
    return idx


def value(f: SuccessFunction, S: Iterable[int]) -> float:
    """``f(S)``; the empty set has value 0."""
    return f._eval(_index(f, S))


def marginal(f: SuccessFunction, i: int, S: Iterable[int]) -> float:
    """``f(S + i) - f(S)`` for an agent ``i`` outside ``S``."""
    S = frozenset(S)
    if i in S:
        raise ValueError(f"agent {i} is already in the set")
    return value(f, S | {i}) - value(f, S)


def marginal_in(f: SuccessFunction, i: int, S: Iterable[int]) -> float:
    """``f(i | S - i)``: contribution of a member ``i`` of ``S``."""
    S = frozenset(S)
    return value(f, S) - value(f, S - {i})


def price_vector(prices) -> np.ndarray:
    p = np.asarray(prices, dtype=float)
    if np.isnan(p).any():
        raise ValueError("prices must not contain NaN")
    if (p < 0).any():
        raise ValueError("prices must be non-negative")
    return p


def demand(f: SuccessFunction, prices) -> frozenset:
    """A set maximizing ``f(S) - sum(prices[S])``.

    Exact for additive and XOS functions. For XOS the maximum over sets and
    clauses commutes, so each clause's additive demand is computed and the best
    clause wins (lowest clause index on ties). Agents whose surplus is exactly
    zero are left out.
    """
    if isinstance(f, XOS):
        clauses = f._clauses
    elif isinstance(f, Additive):
        clauses = f._v[None, :]
    else:
        raise UnsupportedOracle(f"no exact demand oracle for {type(f).__name__}")
    p = price_vector(prices)
    if p.shape != (f.n_agents,):
        raise ValueError(f"expected {f.n_agents} prices, got shape {p.shape}")
    with np.errstate(invalid="ignore"):
        surplus = clauses - p
    take = surplus > 0
    utility = np.where(take, surplus, 0.0).sum(axis=1)
    best = int(np.argmax(utility))
    return frozenset(np.flatnonzero(take[best]).tolist())


def utility(f: SuccessFunction, S: Iterable[int], prices, cap: float = np.inf) -> float:
    """``min(f(S), cap) - sum(prices[S])``."""
    S = list(S)
    p = np.asarray(prices, dtype=float)
    return min(value(f, S), cap) - float(p[S].sum()) if S else 0.0
