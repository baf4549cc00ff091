"""Shrink a team to a target value while keeping members' marginals large.

Marginals are compared against a fixed superset ``S`` rather than the team
itself, so a team cut out of a larger fractional column keeps the incentive
guarantees that column had.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import PreconditionError
from .instance import Allocation, Instance, Params, SuccessFunction
from .oracles import marginal_in, value

PRECONDITION_TOL = 1e-9


def strip_zero_marginals(f: SuccessFunction, T, S) -> tuple:
    """Remove from ``S`` (and ``T``) agents contributing nothing to ``S``, one at a time, lowest index first."""
    S, T = set(S), set(T)
    while True:
        for i in sorted(S):
            if marginal_in(f, i, S) <= 0:
                S.discard(i)
                T.discard(i)
                break
        else:
            return frozenset(T), frozenset(S)


@dataclass(frozen=True)
class ScalingInput:
    f: SuccessFunction
    T: frozenset
    S: frozenset
    delta: float
    psi: float

    def __post_init__(self):
        object.__setattr__(self, "T", frozenset(self.T))
        object.__setattr__(self, "S", frozenset(self.S))

    def check(self) -> None:
        if not self.T <= self.S:
            raise PreconditionError(f"T is not a subset of S: {sorted(self.T - self.S)} outside")
        if not 0 < self.delta <= 1:
            raise PreconditionError(f"delta must lie in (0, 1], got {self.delta}")
        fT = value(self.f, self.T)
        if not 0 <= self.psi < fT:
            raise PreconditionError(f"psi must lie in [0, f(T)) = [0, {fT}), got {self.psi}")


@dataclass
class ScalingTrace:
    result: frozenset
    chain: list = field(default_factory=list)  # T_0, T_1, ..., T_|T|
    ratios: list = field(default_factory=list)  # ratios[s-1] = delta_s
    j_star: int = 0
    k_star: int = 0
    s_star: int = 0


def scale_trace(inp: ScalingInput) -> ScalingTrace:
    inp.check()
    f, delta, psi = inp.f, inp.delta, inp.psi
    T, S = strip_zero_marginals(f, inp.T, inp.S)
    if value(f, T) <= psi:
        # stripping already brought the team under the target
        return ScalingTrace(T, [T])
    base = {i: marginal_in(f, i, S) for i in S}

    chain = [T]
    ratios = []
    current = set(T)
    while current:
        best, best_ratio = None, math.inf
        for i in sorted(current):
            r = marginal_in(f, i, current) / base[i]
            if r < best_ratio:
                best, best_ratio = i, r
        current.discard(best)
        chain.append(frozenset(current))
        ratios.append(best_ratio)

    values = [value(f, U) for U in chain]
    j_star = next(j for j, v in enumerate(values) if v <= psi)
    bar = (1 - delta) * values[j_star - 1]
    k_star = next(k for k, v in enumerate(values) if v <= bar)
    s_star = max(range(j_star, k_star + 1), key=lambda s: (ratios[s - 1], -s))
    return ScalingTrace(chain[s_star - 1], chain, ratios, j_star, k_star, s_star)


def scale(inp: ScalingInput) -> frozenset:
    """``U`` within ``T`` with ``(1-delta) psi <= f(U) <= psi + max f({i})`` and ``f(i|U-i) >= delta f(i|S-i)``."""
    return scale_trace(inp).result


def apply_scaling(instance: Instance, T: Allocation, witnesses, params: Params = Params()) -> Allocation:
    """Scale every rounded team to 1/128 of its value against its witness column ``(S_j, x_j)``.

    Each output team ``U_j`` satisfies ``f_j(i|U_j-i) >= sqrt(2 c_ij f_j(U_j))``,
    so its revenue is at least ``f_j(U_j)/2``.
    """
    m = instance.n_projects
    teams = T.teams(m)
    out = []
    for j in range(m):
        Tj = teams[j]
        if not Tj:
            out.append(frozenset())
            continue
        witness = witnesses[j]
        if witness is None:
            raise PreconditionError(f"project {j}: non-empty team without a witness column")
        Sj, xj = frozenset(witness[0]), float(witness[1])
        f = instance.functions[j]
        _check_witness(instance, params, j, Tj, Sj, xj)
        Tj, Sj = strip_zero_marginals(f, Tj, Sj)
        fT = value(f, Tj)
        if fT <= 0:
            out.append(frozenset())
            continue
        psi = params.psi_factor * fT
        out.append(scale(ScalingInput(f, Tj, Sj, params.scale_delta, psi)))
    return Allocation.from_sets(instance.n_agents, out)


def _check_witness(instance: Instance, params: Params, j: int, Tj, Sj, xj: float) -> None:
    f = instance.functions[j]
    if not Tj <= Sj:
        raise PreconditionError(f"project {j}: team is not inside its witness set")
    fS = value(f, Sj)
    if fS > (1 + params.delta) * xj + PRECONDITION_TOL:
        raise PreconditionError(f"project {j}: f(S)={fS} exceeds (1+delta)x={(1 + params.delta) * xj}")
    for i in sorted(Sj):
        if value(f, [i]) > params.delta * xj + PRECONDITION_TOL:
            raise PreconditionError(f"project {j}: agent {i} has singleton value above delta*x")
        need = math.sqrt(xj * instance.costs[i][j]) / (2 * math.sqrt(2))
        if marginal_in(f, i, Sj) < need - PRECONDITION_TOL:
            raise PreconditionError(f"project {j}: agent {i} marginal below sqrt(x c)/(2 sqrt 2)")
