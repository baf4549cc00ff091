import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multicontract.bruteforce import all_values, subset_matrix
from multicontract.errors import UnsupportedOracle
from multicontract.instance import XOS, Additive, BudgetAdditive, Coverage
from multicontract.oracles import demand, marginal, marginal_in, utility, value


def test_additive_value():
    assert value(Additive([0.4, 0.3]), {0, 1}) == pytest.approx(0.7)


def test_xos_value_is_best_clause():
    assert value(XOS([[0.5, 0.0], [0.2, 0.3]]), {0, 1}) == pytest.approx(0.5)


def test_coverage_value_is_union_weight():
    f = Coverage([0.3, 0.4], [[0], [0, 1]])
    assert value(f, {0, 1}) == pytest.approx(0.7)
    assert value(f, {0}) == pytest.approx(0.3)


def test_empty_set_has_zero_value():
    for f in (Additive([0.4]), XOS([[0.5]]), Coverage([0.3], [[0]]), BudgetAdditive([0.2], 0.1)):
        assert value(f, set()) == 0.0


def test_index_out_of_range():
    with pytest.raises(IndexError):
        value(Additive([0.4, 0.3]), {2})


def test_marginals():
    assert marginal(Additive([0.4, 0.3]), 0, {1}) == pytest.approx(0.4)
    assert marginal(BudgetAdditive([0.6, 0.6], 1.0), 1, {0}) == pytest.approx(0.4)
    assert marginal(Additive([0.0, 0.3]), 0, set()) == 0.0
    assert marginal_in(Additive([0.4, 0.3]), 1, {0, 1}) == pytest.approx(0.3)


def test_marginal_rejects_member():
    with pytest.raises(ValueError):
        marginal(Additive([0.4, 0.3]), 0, {0})


def test_additive_demand():
    f = Additive([0.4, 0.3])
    S = demand(f, [0.1, 0.5])
    assert S == {0}
    assert utility(f, S, [0.1, 0.5]) == pytest.approx(0.3)


def test_xos_demand():
    f = XOS([[0.5, 0.0], [0.0, 0.5]])
    S = demand(f, [0.2, 0.1])
    assert S == {1}
    assert utility(f, S, [0.2, 0.1]) == pytest.approx(0.4)


def test_infinite_prices_give_empty_demand():
    for f in (Additive([0.4, 0.3]), XOS([[0.5, 0.1], [0.1, 0.5]])):
        assert demand(f, [math.inf, math.inf]) == frozenset()


def test_demand_unsupported_for_value_query_classes():
    with pytest.raises(UnsupportedOracle):
        demand(Coverage([0.3], [[0]]), [0.1])
    with pytest.raises(UnsupportedOracle):
        demand(BudgetAdditive([0.3], 0.2), [0.1])


def test_capped_utility():
    f = Additive([0.4, 0.3])
    assert utility(f, {0, 1}, [0.1, 0.1], cap=0.5) == pytest.approx(0.3)


def test_negative_price_rejected():
    with pytest.raises(ValueError):
        demand(Additive([0.4]), [-0.1])


def test_vectorized_values_match_oracle(rng):
    for f in (
        Additive(rng.uniform(0, 0.2, 5).tolist()),
        BudgetAdditive(rng.uniform(0, 0.4, 5).tolist(), 0.5),
        XOS(rng.uniform(0, 0.2, (3, 5)).tolist()),
        Coverage(rng.uniform(0, 0.1, 6).tolist(), [[0, 1], [2], [3, 4, 5], [], [1, 5]]),
    ):
        table = all_values(f, 5)
        for mask in range(32):
            S = {i for i in range(5) if mask >> i & 1}
            assert table[mask] == pytest.approx(value(f, S), abs=1e-12)


values = st.floats(min_value=0.0, max_value=0.3, allow_nan=False)


@st.composite
def xos_and_prices(draw):
    n = draw(st.integers(1, 6))
    k = draw(st.integers(1, 3))
    clauses = [[draw(values) for _ in range(n)] for _ in range(k)]
    prices = [draw(st.floats(min_value=0.0, max_value=0.3)) for _ in range(n)]
    return XOS(clauses), np.array(prices)


@settings(max_examples=150, deadline=None)
@given(xos_and_prices())
def test_demand_is_a_maximizer(case):
    f, p = case
    n = f.n_agents
    best = (all_values(f, n) - subset_matrix(n) @ p).max()
    S = demand(f, p)
    assert utility(f, S, p) >= best - 1e-12


@settings(max_examples=100, deadline=None)
@given(xos_and_prices())
def test_xos_is_monotone_and_subadditive(case):
    f, _ = case
    n = f.n_agents
    table = all_values(f, n)
    for a in range(1 << n):
        for b in range(1 << n):
            assert table[a | b] <= table[a] + table[b] + 1e-12
            if a & b == a:
                assert table[a] <= table[b] + 1e-12
