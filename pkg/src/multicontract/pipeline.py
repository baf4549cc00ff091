"""Linear contracts for a fixed allocation, and the end-to-end approximation.

The solver builds two candidates. The dominant-agent candidate is a
maximum-weight matching. The many-small-agents candidate comes from the
fractional relaxation, rounded to disjoint teams and scaled so every member's
marginal pays for its incentive. The better of the two is returned.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, TextIO

from .errors import ZeroMarginal
from .instance import Allocation, Instance, Params
from .lp_engine import solve_lp1
from .matching import dominant_matching
from .oracles import value
from .rounding import round as round_distribution
from .rounding import to_distributions
from .scaling import apply_scaling

DOMINANT_MATCHING = "DominantMatching"
LP_PIPELINE = "LpPipeline"
BRUTE_FORCE = "BruteForce"
METHODS = (DOMINANT_MATCHING, LP_PIPELINE, BRUTE_FORCE)


@dataclass
class ContractReport:
    allocation: Allocation
    payments: dict  # (agent, project) -> payment on success
    per_project_revenue: list
    total_revenue: float
    method: str = ""
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        teams = {}
        for i, j in enumerate(self.allocation.assignment):
            if j is not None:
                teams.setdefault(str(j), []).append(i)
        doc = {
            "method": self.method,
            "assignment": list(self.allocation.assignment),
            "teams": teams,
            "payments": [
                {"agent": i, "project": j, "payment": t} for (i, j), t in sorted(self.payments.items())
            ],
            "per_project_revenue": list(self.per_project_revenue),
            "total_revenue": self.total_revenue,
        }
        if self.diagnostics:
            doc["diagnostics"] = self.diagnostics
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def revenue(instance: Instance, alloc: Allocation, method: str = "") -> ContractReport:
    """Payments ``t_ij = c_ij / f_j(i | S_j - i)`` and revenues ``(1 - sum t) f_j(S_j)``."""
    m = instance.n_projects
    if alloc.n_agents != instance.n_agents:
        raise ValueError(f"allocation covers {alloc.n_agents} agents, instance has {instance.n_agents}")
    if any(a is not None and not 0 <= a < m for a in alloc.assignment):
        raise ValueError("allocation refers to a project that does not exist")
    payments = {}
    per_project = []
    for j, team in enumerate(alloc.teams(m)):
        if not team:
            per_project.append(0.0)
            continue
        f = instance.functions[j]
        total = value(f, team)
        share = 0.0
        for i in sorted(team):
            gain = total - value(f, team - {i})
            if gain <= 0:
                raise ZeroMarginal(i, j)
            t = instance.costs[i][j] / gain
            payments[(i, j)] = t
            share += t
        per_project.append((1 - share) * total)
    return ContractReport(alloc, payments, per_project, float(sum(per_project)), method)


def _nonnegative(instance: Instance, report: ContractReport) -> ContractReport:
    if report.total_revenue >= 0:
        return report
    empty = revenue(instance, Allocation.empty(instance.n_agents), report.method)
    empty.diagnostics = dict(report.diagnostics, replaced_negative_revenue=report.total_revenue)
    return empty


def lp_candidate(instance: Instance, params: Params = Params(), debug: Optional[TextIO] = None):
    """Run relaxation, rounding and scaling; return ``(allocation, diagnostics)``."""
    sol = solve_lp1(instance, params, debug=debug)
    dist = to_distributions(sol, instance.n_projects, instance.n_agents)
    rounded = round_distribution(dist, instance)
    scaled = apply_scaling(instance, rounded.allocation, rounded.witnesses, params)
    diagnostics = {
        "pathway": sol.pathway,
        "lp1_objective": sol.lp1_objective,
        "reward_objective": sol.reward_objective,
        "gamma_bounds": [sol.gamma_lo, sol.gamma_hi],
        "generated_columns": sol.generated,
        "positive_columns": len(sol.columns),
        "rounded_value": sum(
            value(instance.functions[j], T) for j, T in enumerate(rounded.allocation.teams(instance.n_projects))
        ),
    }
    return scaled, diagnostics


def solve(instance: Instance, params: Params = Params(), debug: Optional[TextIO] = None) -> ContractReport:
    """Better of the matching candidate and the relaxation candidate; ties go to the matching."""
    params.check(instance)
    minus = _nonnegative(instance, revenue(instance, dominant_matching(instance), DOMINANT_MATCHING))
    alloc, diagnostics = lp_candidate(instance, params, debug)
    plus = _nonnegative(instance, revenue(instance, alloc, LP_PIPELINE))
    best = plus if plus.total_revenue > minus.total_revenue else minus
    best.diagnostics = dict(
        best.diagnostics,
        lp=diagnostics,
        candidate_revenue={DOMINANT_MATCHING: minus.total_revenue, LP_PIPELINE: plus.total_revenue},
    )
    return best


def solve_exact(instance: Instance, params: Params = Params()) -> ContractReport:
    from .bruteforce import exact_opt

    opt = exact_opt(instance, params)
    report = revenue(instance, opt.best, BRUTE_FORCE)
    report.diagnostics = {"opt_minus": opt.opt_minus, "opt_plus": opt.opt_plus}
    return report
