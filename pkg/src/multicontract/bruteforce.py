"""Exhaustive oracles used to check the approximation guarantees on small instances.

Everything here evaluates set functions on the full power set at once with
its own vectorized code, so it does not share an evaluation path with
:mod:`multicontract.oracles`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import GuardExceeded
from .instance import XOS, Additive, Allocation, BudgetAdditive, Coverage, Instance, Params

MAX_ASSIGNMENTS = 10**7
MAX_DEMAND_AGENTS = 20
_CHUNK = 1 << 16


def subset_matrix(n: int) -> np.ndarray:
    """Row ``mask`` is the 0/1 membership vector of the subset encoded by ``mask``."""
    masks = np.arange(1 << n)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(float)


def all_values(f, n: int) -> np.ndarray:
    """``f`` evaluated on every subset of ``n`` agents, indexed by bitmask."""
    B = subset_matrix(n)
    if isinstance(f, Additive):
        return B @ np.array(f.values)
    if isinstance(f, BudgetAdditive):
        return np.minimum(B @ np.array(f.values), f.budget)
    if isinstance(f, XOS):
        return (B @ np.array(f.clauses).T).max(axis=1)
    if isinstance(f, Coverage):
        incidence = np.zeros((n, len(f.weights)))
        for i, elements in enumerate(f.covers):
            incidence[i, list(elements)] = 1.0
        covered = (B @ incidence) > 0
        return covered.astype(float) @ np.array(f.weights)
    raise TypeError(f"unsupported function {f!r}")


def revenue_table(values: np.ndarray, costs: np.ndarray) -> np.ndarray:
    """Revenue of one project for every team bitmask; ``-inf`` where a member has zero marginal."""
    n = costs.shape[0]
    size = 1 << n
    masks = np.arange(size)
    payment_share = np.zeros(size)
    feasible = np.ones(size, dtype=bool)
    for i in range(n):
        member = (masks >> i) & 1 == 1
        marginal = values - values[masks & ~(1 << i)]
        ok = marginal > 0
        feasible &= ~member | ok
        with np.errstate(divide="ignore", invalid="ignore"):
            share = np.where(member & ok, costs[i] / np.where(ok, marginal, 1.0), 0.0)
        payment_share += share
    rev = (1 - payment_share) * values
    rev[~feasible] = -np.inf
    rev[0] = 0.0
    return rev


@dataclass(frozen=True)
class ExactOpt:
    best: Allocation
    revenue: float
    per_project_sets: tuple
    per_project_revenue: tuple
    dominant_flags: tuple

    @property
    def opt_minus(self) -> float:
        return float(sum(r for r, d in zip(self.per_project_revenue, self.dominant_flags) if d))

    @property
    def opt_plus(self) -> float:
        return float(sum(r for r, d in zip(self.per_project_revenue, self.dominant_flags) if not d))

    def restricted(self) -> tuple:
        """Teams of the optimum on projects without a dominant agent (empty elsewhere)."""
        return tuple(S if not d else frozenset() for S, d in zip(self.per_project_sets, self.dominant_flags))


def _mask_to_set(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def exact_opt(instance: Instance, params: Params = Params()) -> ExactOpt:
    """Revenue-maximizing allocation by enumerating all ``(m+1)^n`` assignment vectors."""
    n, m = instance.n_agents, instance.n_projects
    if (m + 1) ** n > MAX_ASSIGNMENTS:
        raise GuardExceeded(f"(m+1)^n = {(m + 1) ** n} exceeds {MAX_ASSIGNMENTS}")
    costs = instance.cost_matrix
    values = [all_values(f, n) for f in instance.functions]
    tables = [revenue_table(values[j], costs[:, j]) for j in range(m)]

    # code[i] in {0..m}: 0 = unassigned, j+1 = project j; agent 0 varies slowest
    shape = (m + 1,) * n
    weights = 1 << np.arange(n)
    n_codes = (m + 1) ** n
    best_total, best_codes = -np.inf, None
    for start in range(0, n_codes, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, n_codes))
        codes = np.stack(np.unravel_index(flat, shape), axis=1)
        total = np.zeros(len(flat))
        for j in range(m):
            masks = ((codes == j + 1) * weights).sum(axis=1)
            total += tables[j][masks]
        k = int(np.argmax(total))
        if total[k] > best_total:
            best_total, best_codes = float(total[k]), codes[k]
    assignment = tuple(None if c == 0 else int(c) - 1 for c in best_codes)
    sets, revs, flags = [], [], []
    for j in range(m):
        mask = int(((best_codes == j + 1) * weights).sum())
        S = _mask_to_set(mask)
        sets.append(S)
        revs.append(float(tables[j][mask]))
        fS = values[j][mask]
        flags.append(any(values[j][1 << i] > params.delta * fS for i in S))
    return ExactOpt(Allocation(assignment), best_total, tuple(sets), tuple(revs), tuple(flags))


def exact_opt_recursive(instance: Instance) -> float:
    """Second, independently written optimum: recursion over projects and remaining agents."""
    n, m = instance.n_agents, instance.n_projects
    costs = instance.costs
    functions = instance.functions

    def team_revenue(j, team):
        f = functions[j]
        total = f._eval(np.array(sorted(team), dtype=np.intp))
        pay = 0.0
        for i in team:
            rest = np.array(sorted(team - {i}), dtype=np.intp)
            gain = total - f._eval(rest)
            if gain <= 0:
                return None
            pay += costs[i][j] / gain
        return (1 - pay) * total

    cache = {}

    def best(j, available):
        if j == m:
            return 0.0
        key = (j, available)
        if key in cache:
            return cache[key]
        out = best(j + 1, available)
        pool = sorted(available)
        for r in range(1, len(pool) + 1):
            for team in itertools.combinations(pool, r):
                team = frozenset(team)
                rev = team_revenue(j, team)
                if rev is not None:
                    out = max(out, rev + best(j + 1, available - team))
        cache[key] = out
        return out

    return best(0, frozenset(range(n)))


def exact_single_agent_opt(instance: Instance) -> float:
    """Best revenue over allocations with at most one agent per project."""
    n, m = instance.n_agents, instance.n_projects
    singles = instance.singleton_matrix()
    costs = instance.cost_matrix
    best = 0.0
    for k in range(0, min(n, m) + 1):
        for agents in itertools.combinations(range(n), k):
            for projects in itertools.permutations(range(m), k):
                rev = 0.0
                for i, j in zip(agents, projects):
                    if singles[i, j] <= 0:
                        rev = -np.inf
                        break
                    rev += singles[i, j] * (1 - costs[i, j] / singles[i, j])
                best = max(best, rev)
    return best


def exact_capped_demand(f, cap: float, prices) -> tuple:
    """Exhaustive ``argmax_S min(f(S), cap) - p(S)``; ties go to the smallest bitmask."""
    n = f.n_agents
    if n > MAX_DEMAND_AGENTS:
        raise GuardExceeded(f"{n} agents exceeds the exhaustive demand guard of {MAX_DEMAND_AGENTS}")
    p = np.asarray(prices, dtype=float)
    B = subset_matrix(n)
    finite = np.where(np.isfinite(p), p, 0.0)
    cost = B @ finite
    blocked = (B[:, ~np.isfinite(p)].sum(axis=1) > 0) if (~np.isfinite(p)).any() else np.zeros(len(B), bool)
    util = np.minimum(all_values(f, n), cap) - cost
    util[blocked] = -np.inf
    k = int(np.argmax(util))
    return _mask_to_set(k), float(util[k])


@dataclass(frozen=True)
class ExhaustiveLP:
    optimum: float
    columns: tuple  # (project, estimate, agent set)
    weights: np.ndarray


def _doubling_grid(singles: np.ndarray, n: int) -> list:
    top = int(np.ceil(np.log2(n))) if n > 1 else 0
    return sorted({float(v) * 2.0**k for v in singles if v > 0 for k in range(top + 1)})


def exhaustive_lp1(instance: Instance, params: Params = Params(), submodular: bool = False) -> ExhaustiveLP:
    """Optimum of the fractional relaxation with every column written out, solved by HiGHS.

    ``submodular`` selects the value-query variant: reward scaled by ``1 - 1/e`` and no
    estimate penalty, with unit project capacity.
    """
    from scipy.optimize import linprog

    n, m = instance.n_agents, instance.n_projects
    if n > 10:
        raise GuardExceeded(f"{n} agents is too many for the exhaustive relaxation")
    delta = params.delta
    rho = 1 + 1 / (1 - delta)
    B = subset_matrix(n)
    sqrt_c = np.sqrt(instance.cost_matrix)
    cols, coef = [], []
    for j, f in enumerate(instance.functions):
        vals = all_values(f, n)
        singles = vals[1 << np.arange(n)]
        for x in _doubling_grid(singles, n):
            allowed = singles <= delta * x
            inside = (B[:, ~allowed].sum(axis=1) == 0) if (~allowed).any() else np.ones(len(B), bool)
            penalty = np.sqrt(x) / (2 * np.sqrt(2)) * (B @ sqrt_c[:, j])
            capped = np.minimum(vals, x)
            if submodular:
                c = (1 - 1 / np.e) * capped - penalty
            else:
                c = capped - delta * rho * x - penalty
            for mask in np.flatnonzero(inside):
                if mask == 0:
                    continue
                cols.append((j, x, _mask_to_set(int(mask))))
                coef.append(c[mask])
    if not cols:
        return ExhaustiveLP(0.0, (), np.zeros(0))
    A = np.zeros((m + n, len(cols)))
    for k, (j, _, S) in enumerate(cols):
        A[j, k] = 1.0
        for i in S:
            A[m + i, k] = 1.0
    res = linprog(-np.array(coef), A_ub=A, b_ub=np.ones(m + n), bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"HiGHS failed: {res.message}")
    return ExhaustiveLP(float(-res.fun), tuple(cols), res.x)
