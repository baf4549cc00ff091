import json

import numpy as np
import pytest

from multicontract.errors import InstanceFormatError, InstanceValidationError
from multicontract.instance import (
    XOS,
    Additive,
    Allocation,
    BudgetAdditive,
    Coverage,
    Instance,
    Params,
    dumps,
    load,
    loads,
    save,
    validate,
)


def test_minimal_instance_is_valid():
    inst = Instance(1, 1, [[0.2]], [Additive([0.5])])
    assert validate(inst) == []


def test_value_above_one_is_rejected():
    inst = Instance(1, 1, [[0.0]], [Additive([1.5])])
    assert any("function exceeds probability range" in v for v in validate(inst))


def test_negative_cost_is_rejected():
    inst = Instance(1, 1, [[-0.1]], [Additive([0.5])])
    assert any("negative cost" in v for v in validate(inst))


def test_budget_caps_the_probability_bound():
    # the raw values sum past 1 but the budget keeps the function in range
    inst = Instance(2, 1, [[0.0], [0.0]], [BudgetAdditive([0.8, 0.8], 1.0)])
    assert validate(inst) == []


def test_shape_mismatches_are_reported():
    inst = Instance(2, 1, [[0.0]], [Additive([0.1, 0.2])])
    assert any("costs" in v for v in validate(inst))
    inst = Instance(2, 1, [[0.0], [0.0]], [Additive([0.1])])
    assert any("describes 1 agents" in v for v in validate(inst))


def test_empty_xos_is_rejected():
    inst = Instance(1, 1, [[0.0]], [XOS([])])
    assert any("at least one clause" in v for v in validate(inst))


def test_coverage_with_bad_element_is_rejected():
    inst = Instance(1, 1, [[0.0]], [Coverage([0.3], [[1]])])
    assert any("outside the universe" in v for v in validate(inst))


def test_round_trip_xos(tmp_path):
    inst = Instance(
        3,
        2,
        [[0.01, 0.02], [0.0, 0.1], [0.3, 0.05]],
        [XOS([[0.1, 0.2, 0.3], [0.3, 0.0, 0.1]]), XOS([[0.25, 0.25, 0.25]])],
    )
    path = tmp_path / "inst.json"
    save(inst, path)
    again = load(path)
    assert again == inst
    assert dumps(again) == path.read_text()


def test_round_trip_every_class():
    inst = Instance(
        2,
        4,
        [[0.0] * 4, [0.1] * 4],
        [
            Additive([0.1, 0.2]),
            BudgetAdditive([0.6, 0.6], 1.0),
            Coverage([0.3, 0.4], [[0], [0, 1]]),
            XOS([[0.5, 0.0], [0.2, 0.3]]),
        ],
    )
    assert loads(dumps(inst)) == inst


def test_missing_functions_key():
    doc = {"version": 1, "agents": 1, "projects": 1, "costs": [[0.0]]}
    with pytest.raises(InstanceFormatError, match="functions"):
        loads(json.dumps(doc))


def test_zero_projects_rejected():
    doc = {"version": 1, "agents": 1, "projects": 0, "costs": [[]], "functions": []}
    with pytest.raises(InstanceValidationError, match="at least one project"):
        loads(json.dumps(doc))


def test_parse_error_has_position():
    with pytest.raises(InstanceFormatError, match="line 2"):
        loads('{"version": 1,\n "agents": }')


def test_schema_version_mismatch():
    doc = {"version": 7, "agents": 1, "projects": 1, "costs": [[0.0]], "functions": []}
    with pytest.raises(InstanceFormatError, match="version"):
        loads(json.dumps(doc))


def test_unknown_function_type():
    doc = {"version": 1, "agents": 1, "projects": 1, "costs": [[0.0]], "functions": [{"type": "magic"}]}
    with pytest.raises(InstanceFormatError, match="unknown function type"):
        loads(json.dumps(doc))


def test_allocation_teams_are_disjoint():
    alloc = Allocation.from_sets(4, [{0, 2}, {3}])
    assert alloc.assignment == (0, None, 0, 1)
    assert alloc.teams(3) == (frozenset({0, 2}), frozenset({3}), frozenset())
    with pytest.raises(ValueError):
        Allocation.from_sets(3, [{0}, {0, 1}])


def test_empty_allocation():
    alloc = Allocation.empty(3)
    assert alloc.is_empty()
    assert alloc.team(0) == frozenset()


def test_default_epsilon_below_limit():
    inst = Instance(2, 1, [[0.0], [0.0]], [Additive([0.1, 0.2])])
    p = Params()
    eps = p.resolve_epsilon(inst)
    assert eps == pytest.approx(p.delta * 0.1 / 2)
    p.check(inst)


def test_epsilon_too_large_rejected():
    inst = Instance(2, 1, [[0.0], [0.0]], [Additive([0.1, 0.2])])
    with pytest.raises(ValueError):
        Params(epsilon=0.1).check(inst)


def test_cost_matrix_and_singletons():
    inst = Instance(2, 2, [[0.1, 0.2], [0.3, 0.4]], [Additive([0.1, 0.2]), XOS([[0.3, 0.0], [0.0, 0.4]])])
    assert np.allclose(inst.cost_matrix, [[0.1, 0.2], [0.3, 0.4]])
    assert np.allclose(inst.singleton_matrix(), [[0.1, 0.3], [0.2, 0.4]])
