"""Approximately optimal fractional team assignment by column generation.

The relaxation has one variable per column ``(j, x, S)``: team ``S`` on
project ``j`` under the reward estimate ``x``, restricted to agents whose
singleton value is at most ``delta * x``. Every project and every agent can
carry at most unit weight. The column count is exponential, so the dual is
attacked instead. An approximate separation oracle built on capped demand
either certifies a dual point or returns a violated column. A bisection on
the dual objective bound decides feasibility probes by cutting planes over a
restricted primal solved with :mod:`multicontract.simplex`, whose optimal
duals are the probe points.

Two pathways share the machinery:

``demand``
    additive / XOS projects. Capped demand via demand queries. The oracle
    is off by at most ``rho = 1 + 1/(1 - delta)``, so the restricted primal
    lets each project carry ``rho`` units and the result is scaled by
    ``1/rho``.
``submodular``
    additive / coverage / budget-additive projects. Distorted greedy with
    value queries only, ``rho = 1`` and no scaling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, TextIO, Union

import numpy as np

from .capped_demand import CappedQuery, capped_demand, capped_demand_submodular
from .errors import ColumnBudgetExceeded, ContractError
from .instance import DEMAND_CLASSES, SUBMODULAR_CLASSES, Instance, Params
from .oracles import value
from .simplex import format_tableau, solve_max

DEMAND = "demand"
SUBMODULAR = "submodular"
FEASIBILITY_TOL = 1e-9
COLUMN_BUDGET_FACTOR = 50
_PENALTY = 1 / (2 * math.sqrt(2))


@dataclass(frozen=True)
class Column:
    project: int
    estimate: float
    agents: frozenset
    weight: float = 0.0

    @property
    def key(self) -> tuple:
        return (self.project, self.estimate, tuple(sorted(self.agents)))


@dataclass(frozen=True)
class DualPoint:
    alpha: np.ndarray  # one per project
    beta: np.ndarray  # one per agent


@dataclass(frozen=True)
class AllSatisfied:
    pass


@dataclass(frozen=True)
class ViolatedColumn:
    project: int
    estimate: float
    agents: frozenset
    utility: float  # min(f(S), x) - p(S) at the oracle prices


OracleAnswer = Union[AllSatisfied, ViolatedColumn]


@dataclass
class FractionalSolution:
    columns: list
    pathway: str = DEMAND
    rho: float = 1.0
    reward_objective: float = 0.0
    lp1_objective: float = 0.0
    gamma_lo: float = 0.0
    gamma_hi: float = 0.0
    generated: int = 0
    diagnostics: dict = field(default_factory=dict)

    def project_load(self, n_projects: int) -> np.ndarray:
        load = np.zeros(n_projects)
        for col in self.columns:
            load[col.project] += col.weight
        return load

    def agent_load(self, n_agents: int) -> np.ndarray:
        load = np.zeros(n_agents)
        for col in self.columns:
            for i in col.agents:
                load[i] += col.weight
        return load

    def is_feasible(self, n_agents: int, n_projects: int, tol: float = FEASIBILITY_TOL) -> bool:
        return bool(
            all(col.weight >= 0 for col in self.columns)
            and (self.project_load(n_projects) <= 1 + tol).all()
            and (self.agent_load(n_agents) <= 1 + tol).all()
        )

    def expected_reward(self, instance: Instance) -> float:
        """``sum y * f_j(S)`` over the columns."""
        return float(sum(c.weight * value(instance.functions[c.project], c.agents) for c in self.columns))


# --- problem data -----------------------------------------------------------


def pathway(instance: Instance) -> str:
    if all(isinstance(f, DEMAND_CLASSES) for f in instance.functions):
        return DEMAND
    if all(isinstance(f, SUBMODULAR_CLASSES) for f in instance.functions):
        return SUBMODULAR
    raise ContractError(
        "projects must be all additive/XOS (demand queries) or all submodular (value queries)"
    )


def approximation_factor(delta: float, path: str = DEMAND) -> float:
    return 1 + 1 / (1 - delta) if path == DEMAND else 1.0


def estimate_grid(instance: Instance, j: int) -> list:
    """Doubling grid ``{2^k f_j({i}) : 0 <= k <= ceil(log2 n), f_j({i}) > 0}``, sorted and deduplicated."""
    singles = instance.singleton_matrix()[:, j]
    top = math.ceil(math.log2(instance.n_agents)) if instance.n_agents > 1 else 0
    grid = {float(v) * 2.0**k for v in singles if v > 0 for k in range(top + 1)}
    return sorted(grid)


def column_reward(instance: Instance, j: int, x: float, S) -> float:
    """``min(f_j(S), x) - sqrt(x)/(2 sqrt 2) * sum_{i in S} sqrt(c_ij)``."""
    costs = instance.costs
    penalty = _PENALTY * math.sqrt(x) * sum(math.sqrt(costs[i][j]) for i in S)
    return min(value(instance.functions[j], S), x) - penalty


def lp1_coefficient(instance: Instance, params: Params, j: int, x: float, S, path: str = DEMAND) -> float:
    """Objective coefficient of column ``(j, x, S)`` in the relaxation itself."""
    if path == DEMAND:
        rho = approximation_factor(params.delta, DEMAND)
        return column_reward(instance, j, x, S) - params.delta * rho * x
    capped = min(value(instance.functions[j], S), x)
    return (1 - 1 / math.e) * capped - (capped - column_reward(instance, j, x, S))


def oracle_prices(instance: Instance, params: Params, j: int, x: float, beta) -> np.ndarray:
    """``sqrt(x c_ij)/(2 sqrt 2) + beta_i`` for agents with ``f_j({i}) <= delta x``; ``inf`` otherwise."""
    singles = instance.singleton_matrix()[:, j]
    sqrt_c = np.sqrt(instance.cost_matrix[:, j])
    p = _PENALTY * math.sqrt(x) * sqrt_c + np.asarray(beta, dtype=float)
    return np.where(singles <= params.delta * x, p, np.inf)


# --- separation oracle ------------------------------------------------------


class _Oracle:
    """Per-instance cache of prices pieces and grids for repeated oracle sweeps."""

    def __init__(self, instance: Instance, params: Params, path: Optional[str] = None):
        self.instance = instance
        self.params = params
        self.path = path or pathway(instance)
        self.rho = approximation_factor(params.delta, self.path)
        self.grids = [estimate_grid(instance, j) for j in range(instance.n_projects)]
        self.singles = instance.singleton_matrix()
        self.sqrt_c = np.sqrt(instance.cost_matrix)

    def prices(self, j: int, x: float, beta: np.ndarray) -> np.ndarray:
        p = _PENALTY * math.sqrt(x) * self.sqrt_c[:, j] + beta
        return np.where(self.singles[:, j] <= self.params.delta * x, p, np.inf)

    def approx_demand(self, j: int, x: float, p: np.ndarray) -> frozenset:
        f = self.instance.functions[j]
        if not np.isfinite(p).any():
            return frozenset()
        if self.path == DEMAND:
            return capped_demand(CappedQuery(f, x, self.params.delta, p))
        return capped_demand_submodular(f, x, p)

    def sweep(self, dual: DualPoint, first_only: bool = False, tol: float = 0.0):
        """Yield every ``(j, x)`` whose approximate demand violates the certificate test, in order."""
        alpha = np.asarray(dual.alpha, dtype=float)
        beta = np.asarray(dual.beta, dtype=float)
        for j, grid in enumerate(self.grids):
            f = self.instance.functions[j]
            for x in grid:
                p = self.prices(j, x, beta)
                S = self.approx_demand(j, x, p)
                if not S:
                    continue
                u = min(value(f, S), x) - float(p[sorted(S)].sum())
                if self.rho * u > alpha[j] + tol:
                    yield ViolatedColumn(j, x, S, u)
                    if first_only:
                        return


def separation_oracle(instance: Instance, params: Params, dual: DualPoint) -> OracleAnswer:
    """Certify the dual point or return the first approximately violated column in ``(j, x)`` order."""
    for hit in _Oracle(instance, params).sweep(dual, first_only=True):
        return hit
    return AllSatisfied()


# --- restricted primal ------------------------------------------------------


class _ColumnPool:
    def __init__(self, instance: Instance, rho: float, tol: float):
        self.instance = instance
        self.rho = rho
        self.tol = tol
        self.columns: list = []
        self.rewards: list = []
        self._keys: set = set()
        self._cached = None

    def __len__(self):
        return len(self.columns)

    def __contains__(self, key):
        return key in self._keys

    def add(self, j: int, x: float, S: frozenset) -> bool:
        col = Column(j, x, frozenset(S))
        if col.key in self._keys:
            return False
        self._keys.add(col.key)
        self.columns.append(col)
        self.rewards.append(column_reward(self.instance, j, x, S))
        self._cached = None
        return True

    def matrix(self):
        m, n = self.instance.n_projects, self.instance.n_agents
        A = np.zeros((m + n, len(self.columns)))
        for k, col in enumerate(self.columns):
            A[col.project, k] = 1 / self.rho
            for i in col.agents:
                A[m + i, k] = 1.0
        return A

    def solve(self):
        if self._cached is None:
            m, n = self.instance.n_projects, self.instance.n_agents
            if not self.columns:
                self._cached = (0.0, DualPoint(np.zeros(m), np.zeros(n)), np.zeros(0), None)
            else:
                res = solve_max(np.array(self.rewards), self.matrix(), np.ones(m + n), tol=self.tol)
                dual = DualPoint(res.duals[:m].copy(), res.duals[m:].copy())
                self._cached = (res.objective, dual, res.x, res)
        return self._cached


# --- main algorithm ---------------------------------------------------------


def column_budget(instance: Instance) -> int:
    grid_size = len({x for j in range(instance.n_projects) for x in estimate_grid(instance, j)})
    return COLUMN_BUDGET_FACTOR * (instance.n_agents + instance.n_projects) * max(grid_size, 1)


def _cleanup(instance: Instance, params: Params, weights: dict) -> dict:
    """Drop under-paid agents and trim over-valued teams until neither rule fires."""
    costs = instance.costs
    functions = instance.functions

    def under_paid(j, x, S):
        f = functions[j]
        fS = value(f, S)
        for i in sorted(S):
            if fS - value(f, S - {i}) < _PENALTY * math.sqrt(x * costs[i][j]):
                return i
        return None

    current = dict(weights)
    while True:
        changed = False
        for rule in ("marginal", "cap"):
            while True:
                moved = False
                for key in sorted(current):
                    j, x, agents = key
                    S = frozenset(agents)
                    if rule == "marginal":
                        drop = under_paid(j, x, S)
                    else:
                        drop = min(S) if value(functions[j], S) > (1 + params.delta) * x else None
                    if drop is None:
                        continue
                    y = current.pop(key)
                    rest = tuple(sorted(S - {drop}))
                    if rest:
                        new_key = (j, x, rest)
                        current[new_key] = current.get(new_key, 0.0) + y
                    moved = changed = True
                    break
                if not moved:
                    break
        if not changed:
            return current


def solve_lp1(instance: Instance, params: Params = Params(), debug: Optional[TextIO] = None) -> FractionalSolution:
    """Fractional solution of the relaxation satisfying the three output guarantees.

    1. few positive columns;
    2. ``sum y (min(f,x) - sqrt(x)/(2 sqrt 2) sum sqrt c) >= max(P - eps, 0) / rho``;
    3. every positive column has ``f(S) <= (1+delta)x``, ``f({i}) <= delta x`` and
       ``f(i | S - i) >= sqrt(x c_ij)/(2 sqrt 2)``.
    """
    params.check(instance)
    oracle = _Oracle(instance, params)
    path, rho = oracle.path, oracle.rho
    n, m = instance.n_agents, instance.n_projects
    eps = params.resolve_epsilon(instance)
    budget = column_budget(instance)
    pool = _ColumnPool(instance, rho, params.lp_tol)
    cut_tol = 10 * params.lp_tol * rho

    singles = instance.singleton_matrix()
    lo, hi = 0.0, m * n * float(singles.max(initial=0.0))
    certified = math.inf  # smallest dual objective already certified by the oracle
    probes = 0

    def probe(gamma: float) -> bool:
        nonlocal certified
        while True:
            if certified <= gamma:
                return True
            objective, dual, _, _ = pool.solve()
            if objective > gamma:
                return False
            added = 0
            for hit in oracle.sweep(dual, tol=cut_tol):
                added += pool.add(hit.project, hit.estimate, hit.agents)
            if not added:
                certified = min(certified, objective)
                return True
            if len(pool) > budget:
                raise ColumnBudgetExceeded(f"{len(pool)} columns generated, budget is {budget}")

    while hi - lo >= eps:
        gamma = (lo + hi) / 2
        probes += 1
        if probe(gamma):
            hi = gamma
        else:
            lo = gamma

    objective, _, y, res = pool.solve()
    if debug is not None and res is not None:
        names = [f"c{k}" for k in range(len(pool))] + [f"s{k}" for k in range(m + n)]
        rows = [f"proj{j}" for j in range(m)] + [f"agent{i}" for i in range(n)]
        debug.write(format_tableau(res, rows, names) + "\n")

    weights: dict = {}
    for col, yk in zip(pool.columns, y):
        if yk > 0:
            key = col.key
            weights[key] = weights.get(key, 0.0) + float(yk) / rho

    def lp1_value(w):
        return sum(y * lp1_coefficient(instance, params, j, x, frozenset(S), path) for (j, x, S), y in w.items())

    def reward_value(w):
        return sum(y * column_reward(instance, j, x, frozenset(S)) for (j, x, S), y in w.items())

    diagnostics = {
        "restricted_objective": objective,
        "bisection_probes": probes,
        "pre_cleanup_lp1_objective": lp1_value(weights),
        "pre_cleanup_reward_objective": reward_value(weights),
    }
    # The guard tests the reward objective: the relaxation's own objective can be
    # negative here even when its optimum is well above epsilon.
    if diagnostics["pre_cleanup_reward_objective"] < 0:
        weights = {}
    else:
        weights = _cleanup(instance, params, weights)

    columns = [Column(j, x, frozenset(S), y) for (j, x, S), y in sorted(weights.items()) if y > 0]
    reward = sum(c.weight * column_reward(instance, c.project, c.estimate, c.agents) for c in columns)
    return FractionalSolution(
        columns=columns,
        pathway=path,
        rho=rho,
        reward_objective=float(reward),
        lp1_objective=float(lp1_value(weights)),
        gamma_lo=lo,
        gamma_hi=hi,
        generated=len(pool),
        diagnostics=diagnostics,
    )
