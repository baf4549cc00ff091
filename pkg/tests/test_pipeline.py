import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multicontract.bruteforce import exact_opt
from multicontract.errors import ZeroMarginal
from multicontract.instance import XOS, Additive, Allocation, Instance, Params
from multicontract.pipeline import lp_candidate, revenue, solve, solve_exact


def test_two_agent_revenue():
    inst = Instance(2, 1, [[0.05], [0.05]], [Additive([0.4, 0.3])])
    rep = revenue(inst, Allocation((0, 0)))
    assert rep.payments[(0, 0)] == pytest.approx(0.125)
    assert rep.payments[(1, 0)] == pytest.approx(1 / 6)
    assert rep.total_revenue == pytest.approx(0.7 * (1 - 0.125 - 1 / 6))
    assert rep.total_revenue == pytest.approx(0.495833, abs=1e-6)


def test_empty_allocation_has_zero_revenue():
    inst = Instance(2, 1, [[0.05], [0.05]], [Additive([0.4, 0.3])])
    rep = revenue(inst, Allocation.empty(2))
    assert rep.total_revenue == 0.0 and rep.payments == {}


def test_zero_marginal_is_an_error():
    inst = Instance(2, 1, [[0.0], [0.0]], [XOS([[0.4, 0.0], [0.0, 0.3]])])
    with pytest.raises(ZeroMarginal) as err:
        revenue(inst, Allocation((0, 0)))
    assert (err.value.agent, err.value.project) == (1, 0)


def test_payments_only_on_own_project():
    inst = Instance(3, 2, [[0.01, 0.02]] * 3, [Additive([0.2, 0.1, 0.3]), Additive([0.1, 0.3, 0.2])])
    rep = revenue(inst, Allocation((0, 1, 0)))
    assert set(rep.payments) == {(0, 0), (1, 1), (2, 0)}
    assert sum(rep.per_project_revenue) == pytest.approx(rep.total_revenue, abs=1e-12)


def test_dominant_agent_instance_matches_optimum():
    inst = Instance(3, 1, [[0.1], [0.0009], [0.0009]], [Additive([0.5, 0.001, 0.001])])
    rep = solve(inst)
    assert rep.method == "DominantMatching"
    assert rep.total_revenue == pytest.approx(exact_opt(inst).revenue, abs=1e-12)
    assert rep.allocation.assignment == (0, None, None)


def test_many_small_agents_zero_costs():
    values = [0.5] + [0.001 * (k + 1) for k in range(7)]
    inst = Instance(8, 1, [[0.0]] * 8, [Additive(values)])
    alloc, diag = lp_candidate(inst)
    rep = revenue(inst, alloc)
    assert diag["rounded_value"] > 0
    assert rep.payments == {} or all(t == 0 for t in rep.payments.values())
    assert rep.total_revenue >= diag["rounded_value"] / 512
    assert 0 not in alloc.team(0)


def test_all_costs_above_values():
    inst = Instance(3, 2, [[0.9, 0.9]] * 3, [Additive([0.1, 0.2, 0.05]), Additive([0.2, 0.1, 0.3])])
    rep = solve(inst)
    assert rep.allocation.is_empty() and rep.total_revenue == 0.0


def test_report_json():
    inst = Instance(2, 1, [[0.05], [0.05]], [Additive([0.4, 0.3])])
    doc = json.loads(solve(inst).dumps())
    assert doc["method"] in ("DominantMatching", "LpPipeline")
    assert doc["total_revenue"] == pytest.approx(sum(doc["per_project_revenue"]))
    assert "lp1_objective" in doc["diagnostics"]["lp"]
    assert "reward_objective" in doc["diagnostics"]["lp"]


def test_exact_report():
    inst = Instance(2, 1, [[0.05], [0.05]], [Additive([0.4, 0.3])])
    rep = solve_exact(inst)
    assert rep.method == "BruteForce"
    assert rep.total_revenue == pytest.approx(exact_opt(inst).revenue)


def test_solve_is_deterministic():
    inst = Instance(4, 2, [[0.01, 0.02]] * 4, [XOS([[0.1, 0.2, 0.05, 0.1]]), Additive([0.05, 0.1, 0.2, 0.3])])
    assert solve(inst, Params()).to_json() == solve(inst, Params()).to_json()


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(0.01, 0.3), min_size=2, max_size=6),
    st.lists(st.floats(0.0, 0.2), min_size=6, max_size=6),
    st.integers(0, 5),
)
def test_dropping_overpaid_agent_never_hurts(values, costs, k):
    n = len(values)
    k %= n
    inst = Instance(n, 1, [[c] for c in costs[:n]], [Additive(values)])
    full = revenue(inst, Allocation((0,) * n))
    share = values[k] / sum(values)
    if full.payments[(k, 0)] > share:
        dropped = revenue(inst, Allocation(tuple(None if i == k else 0 for i in range(n))))
        assert dropped.total_revenue >= full.total_revenue - 1e-12
