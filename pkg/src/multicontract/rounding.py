"""Deterministic rounding of a fractional team assignment into disjoint teams.

Each project's columns define a distribution over teams. Rounding repeatedly
commits one (project, team) pair whose value plus half of the remaining
expected value keeps at least half of the current expected value, then
removes the committed agents from every other project's distribution.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, RoundingError
from .instance import Allocation, Instance
from .lp_engine import FEASIBILITY_TOL, FractionalSolution
from .oracles import value

ACCEPT_TOL = 1e-9


@dataclass(frozen=True)
class SupportEntry:
    agents: frozenset
    prob: float
    witness: tuple  # (original column team S, estimate x)


@dataclass(frozen=True)
class SupportDistribution:
    """Per project, a list of distinct teams with probabilities; the rest of the mass is on the empty team."""

    supports: tuple  # tuple (per project) of tuples of SupportEntry

    @property
    def n_projects(self) -> int:
        return len(self.supports)

    def total_mass(self, j: int) -> float:
        return float(sum(e.prob for e in self.supports[j]))

    def agent_mass(self, n_agents: int) -> np.ndarray:
        mass = np.zeros(n_agents)
        for entries in self.supports:
            for e in entries:
                for i in e.agents:
                    mass[i] += e.prob
        return mass

    def check(self, n_agents: int | None = None, tol: float = FEASIBILITY_TOL) -> None:
        """Per-project invariants always; the per-agent mass bound only when ``n_agents`` is given."""
        for j, entries in enumerate(self.supports):
            sets = [e.agents for e in entries]
            if len(set(sets)) != len(sets):
                raise PreconditionError(f"project {j} has repeated support sets")
            if any(e.prob <= 0 for e in entries):
                raise PreconditionError(f"project {j} has a non-positive probability")
            if self.total_mass(j) > 1 + tol:
                raise PreconditionError(f"project {j} has total probability {self.total_mass(j)}")
        if n_agents is None:
            return
        mass = self.agent_mass(n_agents)
        if (mass > 1 + tol).any():
            i = int(np.argmax(mass))
            raise PreconditionError(f"agent {i} is selected with total probability {mass[i]}")


@dataclass(frozen=True)
class RoundedAllocation:
    allocation: Allocation
    witnesses: tuple  # per project: (S_j, x_j) of the column the team came from, or None


def to_distributions(sol: FractionalSolution, n_projects: int, n_agents: int | None = None) -> SupportDistribution:
    """Sum column weights over estimates for each (project, team); keep the first column's (S, x) as witness."""
    if n_agents is not None and not sol.is_feasible(n_agents, n_projects):
        raise PreconditionError("fractional solution violates a load constraint")
    per_project: list = [dict() for _ in range(n_projects)]
    for col in sol.columns:
        if col.weight <= 0 or not col.agents:
            continue
        bucket = per_project[col.project]
        if col.agents in bucket:
            prob, witness = bucket[col.agents]
            bucket[col.agents] = (prob + col.weight, witness)
        else:
            bucket[col.agents] = (col.weight, (col.agents, col.estimate))
    supports = tuple(
        tuple(SupportEntry(S, p, w) for S, (p, w) in bucket.items()) for bucket in per_project
    )
    return SupportDistribution(supports)


def val(dist: SupportDistribution, instance: Instance, projects, agents) -> float:
    """Expected value ``sum_{j in projects} sum_t q_{j,t} f_j(S_{j,t} & agents)``."""
    allowed = frozenset(agents)
    total = 0.0
    for j in sorted(projects):
        f = instance.functions[j]
        for e in dist.supports[j]:
            total += e.prob * value(f, e.agents & allowed)
    return total


def _restrict(entries: tuple, removed: frozenset) -> tuple:
    merged: dict = {}
    for e in entries:
        rest = e.agents - removed
        if not rest:
            continue
        if rest in merged:
            prev = merged[rest]
            merged[rest] = SupportEntry(rest, prev.prob + e.prob, prev.witness)
        else:
            merged[rest] = SupportEntry(rest, e.prob, e.witness)
    return tuple(merged.values())


def round(dist: SupportDistribution, instance: Instance) -> RoundedAllocation:  # noqa: A001
    """Disjoint teams ``T_j``, each inside a support set, with ``sum f_j(T_j) >= VAL / 2``.

    The half-value guarantee needs every agent's total selection probability to
    be at most 1; the procedure itself also runs on overlapping supports.
    """
    m = instance.n_projects
    if dist.n_projects != m:
        raise PreconditionError(f"distribution covers {dist.n_projects} projects, instance has {m}")
    dist.check()
    supports = list(dist.supports)
    remaining = set(range(m))
    teams: list = [frozenset()] * m
    witnesses: list = [None] * m

    def current_val(projects, banned: frozenset) -> float:
        total = 0.0
        for k in projects:
            f = instance.functions[k]
            for e in supports[k]:
                total += e.prob * value(f, e.agents - banned)
        return total

    while remaining:
        target = current_val(remaining, frozenset()) / 2
        choice = None
        for j in sorted(remaining):
            others = [k for k in sorted(remaining) if k != j]
            f = instance.functions[j]
            candidates = list(supports[j]) + [None]  # None is the implicit empty team
            for e in candidates:
                team = e.agents if e is not None else frozenset()
                score = value(f, team) + current_val(others, team) / 2
                if score >= target - ACCEPT_TOL:
                    choice = (j, e)
                    break
            if choice is not None:
                break
        if choice is None:
            raise RoundingError(f"no (project, team) pair keeps half of the expected value {2 * target}")
        j, e = choice
        remaining.discard(j)
        if e is not None:
            teams[j] = e.agents
            witnesses[j] = e.witness
            for k in remaining:
                supports[k] = _restrict(supports[k], e.agents)
    return RoundedAllocation(Allocation.from_sets(instance.n_agents, teams), tuple(witnesses))
