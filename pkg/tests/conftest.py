import numpy as np
import pytest

from multicontract.generate import random_function
from multicontract.instance import XOS, Additive, Instance


def random_instance(rng, n, m, kind="xos", cost_scale=0.5):
    functions = [random_function(rng, kind, n) for _ in range(m)]
    singles = np.column_stack([f._singletons() for f in functions])
    costs = rng.uniform(0, cost_scale * singles.max(), size=(n, m))
    return Instance(n, m, costs.tolist(), functions)


def small_xos(rng, n, clauses=3):
    return XOS([rng.uniform(0, 1 / n, size=n).tolist() for _ in range(clauses)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_agent_additive():
    return Instance(2, 1, [[0.05], [0.05]], [Additive([0.4, 0.3])])
