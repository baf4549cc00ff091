"""Problem data model: success functions, instances, allocations and solver parameters.

Success functions come in four explicit representations. All of them are
normalized and monotone whenever their numeric entries are non-negative, so
validation reduces to sign checks plus an analytic upper bound on the value.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import ClassVar, Iterable, Optional, Sequence, Union

import numpy as np

from .errors import InstanceFormatError, InstanceValidationError

SCHEMA_VERSION = 1
PROBABILITY_SLACK = 1e-9


def _as_float_tuple(values) -> tuple:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class Additive:
    values: tuple

    tag: ClassVar[str] = "additive"

    def __post_init__(self):
        object.__setattr__(self, "values", _as_float_tuple(self.values))
        object.__setattr__(self, "_v", np.array(self.values, dtype=float))

    @property
    def n_agents(self) -> int:
        return len(self.values)

    def max_value(self) -> float:
        return float(sum(self.values))

    def _eval(self, idx: np.ndarray) -> float:
        return float(self._v[idx].sum())

    def _singletons(self) -> np.ndarray:
        return self._v.copy()


@dataclass(frozen=True)
class BudgetAdditive:
    """``min(sum of values, budget)``."""

    values: tuple
    budget: float

    tag: ClassVar[str] = "budget_additive"

    def __post_init__(self):
        object.__setattr__(self, "values", _as_float_tuple(self.values))
        object.__setattr__(self, "budget", float(self.budget))
        object.__setattr__(self, "_v", np.array(self.values, dtype=float))

    @property
    def n_agents(self) -> int:
        return len(self.values)

    def max_value(self) -> float:
        return min(float(sum(self.values)), self.budget)

    def _eval(self, idx: np.ndarray) -> float:
        return min(float(self._v[idx].sum()), self.budget)

    def _singletons(self) -> np.ndarray:
        return np.minimum(self._v, self.budget)


@dataclass(frozen=True)
class Coverage:
    """Weighted coverage: agent ``i`` covers the elements ``covers[i]``.

    The value of a team is the total weight of the union of what its members cover.
    """

    weights: tuple
    covers: tuple

    tag: ClassVar[str] = "coverage"

    def __post_init__(self):
        object.__setattr__(self, "weights", _as_float_tuple(self.weights))
        object.__setattr__(self, "covers", tuple(frozenset(int(e) for e in c) for c in self.covers))
        incidence = np.zeros((len(self.covers), len(self.weights)), dtype=bool)
        for i, elements in enumerate(self.covers):
            for e in elements:
                if 0 <= e < len(self.weights):
                    incidence[i, e] = True
        object.__setattr__(self, "_w", np.array(self.weights, dtype=float))
        object.__setattr__(self, "_incidence", incidence)

    @property
    def n_agents(self) -> int:
        return len(self.covers)

    def max_value(self) -> float:
        return float(sum(self.weights))

    def _eval(self, idx: np.ndarray) -> float:
        if idx.size == 0:
            return 0.0
        covered = self._incidence[idx].any(axis=0)
        return float(self._w[covered].sum())

    def _singletons(self) -> np.ndarray:
        return self._incidence.astype(float) @ self._w


@dataclass(frozen=True)
class XOS:
    """Pointwise maximum of additive clauses."""

    clauses: tuple

    tag: ClassVar[str] = "xos"

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(_as_float_tuple(c) for c in self.clauses))
        width = len(self.clauses[0]) if self.clauses else 0
        arr = np.array(self.clauses, dtype=float).reshape(len(self.clauses), width)
        object.__setattr__(self, "_clauses", arr)

    @property
    def n_agents(self) -> int:
        return self._clauses.shape[1]

    def max_value(self) -> float:
        return float(self._clauses.sum(axis=1).max()) if len(self.clauses) else 0.0

    def _eval(self, idx: np.ndarray) -> float:
        return float(self._clauses[:, idx].sum(axis=1).max())

    def _singletons(self) -> np.ndarray:
        return self._clauses.max(axis=0)


SuccessFunction = Union[Additive, BudgetAdditive, Coverage, XOS]
FUNCTION_TYPES = {cls.tag: cls for cls in (Additive, BudgetAdditive, Coverage, XOS)}

# Classes whose demand query is exact; the others only answer value queries.
DEMAND_CLASSES = (Additive, XOS)
SUBMODULAR_CLASSES = (Additive, BudgetAdditive, Coverage)


def singleton_values(f: SuccessFunction) -> np.ndarray:
    """Vector of ``f({i})`` for every agent."""
    return f._singletons()


@dataclass(frozen=True)
class Instance:
    n_agents: int
    n_projects: int
    costs: tuple
    functions: tuple

    def __post_init__(self):
        object.__setattr__(self, "costs", tuple(_as_float_tuple(row) for row in self.costs))
        object.__setattr__(self, "functions", tuple(self.functions))

    @property
    def cost_matrix(self) -> np.ndarray:
        return np.array(self.costs, dtype=float).reshape(self.n_agents, self.n_projects)

    def cost(self, agent: int, project: int) -> float:
        return self.costs[agent][project]

    def singleton_matrix(self) -> np.ndarray:
        """``n_agents x n_projects`` matrix of singleton values ``f_j({i})``."""
        if not self.functions:
            return np.zeros((self.n_agents, 0))
        return np.column_stack([singleton_values(f) for f in self.functions])

    def validate(self) -> list:
        return validate(self)


Agents = frozenset


@dataclass(frozen=True)
class Allocation:
    """Partial partition of agents into projects.

    ``assignment[i]`` is the project of agent ``i`` or ``None`` when unassigned,
    so disjointness of the project teams holds by construction.
    """

    assignment: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "assignment", tuple(None if a is None else int(a) for a in self.assignment)
        )

    @classmethod
    def empty(cls, n_agents: int) -> "Allocation":
        return cls((None,) * n_agents)

    @classmethod
    def from_sets(cls, n_agents: int, sets: Sequence[Iterable[int]]) -> "Allocation":
        assignment: list = [None] * n_agents
        for j, team in enumerate(sets):
            for i in team:
                if assignment[i] is not None:
                    raise ValueError(f"agent {i} assigned to projects {assignment[i]} and {j}")
                assignment[i] = j
        return cls(tuple(assignment))

    @property
    def n_agents(self) -> int:
        return len(self.assignment)

    def team(self, project: int) -> frozenset:
        return frozenset(i for i, a in enumerate(self.assignment) if a == project)

    def teams(self, n_projects: int) -> tuple:
        out = [set() for _ in range(n_projects)]
        for i, a in enumerate(self.assignment):
            if a is not None:
                out[a].add(i)
        return tuple(frozenset(s) for s in out)

    def is_empty(self) -> bool:
        return all(a is None for a in self.assignment)


@dataclass(frozen=True)
class Params:
    delta: float = 1 / 129
    epsilon: Optional[float] = None
    lp_tol: float = 1e-9
    scale_delta: float = 0.5
    psi_factor: float = 1 / 128

    def resolve_epsilon(self, instance: Instance) -> float:
        """The explicit epsilon, or half of its upper limit ``delta * min positive singleton``."""
        if self.epsilon is not None:
            return float(self.epsilon)
        floor = min_positive_singleton(instance)
        if floor is None:
            return self.lp_tol
        return self.delta / 2 * floor

    def check(self, instance: Instance) -> None:
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0 < self.scale_delta <= 1:
            raise ValueError(f"scale_delta must lie in (0, 1], got {self.scale_delta}")
        eps = self.resolve_epsilon(instance)
        if eps <= 0:
            raise ValueError(f"epsilon must be positive, got {eps}")
        floor = min_positive_singleton(instance)
        if floor is not None and not eps < self.delta * floor:
            raise ValueError(
                f"epsilon={eps} must be strictly below delta * min positive singleton = {self.delta * floor}"
            )


def min_positive_singleton(instance: Instance) -> Optional[float]:
    s = instance.singleton_matrix()
    positive = s[s > 0]
    return float(positive.min()) if positive.size else None


# --- validation -------------------------------------------------------------


def _validate_function(j: int, f, n_agents: int) -> list:
    where = f"functions[{j}]"
    if not isinstance(f, tuple(FUNCTION_TYPES.values())):
        return [f"{where}: unknown function type {type(f).__name__}"]
    out = []
    if f.n_agents != n_agents:
        out.append(f"{where}: describes {f.n_agents} agents, instance has {n_agents}")
    if isinstance(f, (Additive, BudgetAdditive)):
        if any(not math.isfinite(v) or v < 0 for v in f.values):
            out.append(f"{where}: negative or non-finite value")
    if isinstance(f, BudgetAdditive) and (not math.isfinite(f.budget) or f.budget < 0):
        out.append(f"{where}: negative budget")
    if isinstance(f, Coverage):
        if any(not math.isfinite(w) or w < 0 for w in f.weights):
            out.append(f"{where}: negative element weight")
        n_elements = len(f.weights)
        if any(e < 0 or e >= n_elements for c in f.covers for e in c):
            out.append(f"{where}: cover references an element outside the universe")
    if isinstance(f, XOS):
        if len(f.clauses) == 0:
            out.append(f"{where}: XOS function needs at least one clause")
        elif any(len(c) != f.n_agents for c in f.clauses):
            out.append(f"{where}: XOS clauses have different lengths")
        elif any(not math.isfinite(v) or v < 0 for c in f.clauses for v in c):
            out.append(f"{where}: negative XOS clause entry")
    if not out and f.max_value() > 1 + PROBABILITY_SLACK:
        out.append(f"{where}: function exceeds probability range (max value {f.max_value():.6g} > 1)")
    return out


def validate(instance: Instance) -> list:
    """Return a list of human-readable invariant violations; empty means valid."""
    out = []
    if instance.n_agents < 1:
        out.append("n_agents: need at least one agent")
    if instance.n_projects < 1:
        out.append("n_projects: need at least one project")
    if len(instance.costs) != instance.n_agents or any(
        len(row) != instance.n_projects for row in instance.costs
    ):
        out.append(f"costs: expected a {instance.n_agents} x {instance.n_projects} matrix")
    else:
        for i, row in enumerate(instance.costs):
            for j, c in enumerate(row):
                if not math.isfinite(c) or c < 0:
                    out.append(f"costs[{i}][{j}]: negative cost ({c})")
    if len(instance.functions) != instance.n_projects:
        out.append(
            f"functions: expected {instance.n_projects} success functions, got {len(instance.functions)}"
        )
    for j, f in enumerate(instance.functions):
        out.extend(_validate_function(j, f, instance.n_agents))
    return out


# --- serialization ----------------------------------------------------------


def function_to_json(f: SuccessFunction) -> dict:
    if isinstance(f, Additive):
        return {"type": f.tag, "values": list(f.values)}
    if isinstance(f, BudgetAdditive):
        return {"type": f.tag, "values": list(f.values), "budget": f.budget}
    if isinstance(f, Coverage):
        return {"type": f.tag, "weights": list(f.weights), "covers": [sorted(c) for c in f.covers]}
    if isinstance(f, XOS):
        return {"type": f.tag, "clauses": [list(c) for c in f.clauses]}
    raise TypeError(f"not a success function: {f!r}")


def function_from_json(obj, where: str) -> SuccessFunction:
    if not isinstance(obj, dict) or "type" not in obj:
        raise InstanceFormatError(f"{where}: expected an object with a 'type' field")
    kind = obj["type"]
    try:
        if kind == "additive":
            return Additive(obj["values"])
        if kind == "budget_additive":
            return BudgetAdditive(obj["values"], obj["budget"])
        if kind == "coverage":
            return Coverage(obj["weights"], obj["covers"])
        if kind == "xos":
            return XOS(obj["clauses"])
    except KeyError as exc:
        raise InstanceFormatError(f"{where}: missing field {exc.args[0]!r} for type {kind!r}") from None
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"{where}: {exc}") from None
    raise InstanceFormatError(f"{where}: unknown function type {kind!r}")


def instance_to_json(instance: Instance) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "agents": instance.n_agents,
        "projects": instance.n_projects,
        "costs": [list(row) for row in instance.costs],
        "functions": [function_to_json(f) for f in instance.functions],
    }


def instance_from_json(doc) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level: expected a JSON object")
    version = doc.get("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InstanceFormatError(f"version: unsupported schema version {version!r} (expected {SCHEMA_VERSION})")
    for key in ("agents", "projects", "costs", "functions"):
        if key not in doc:
            raise InstanceFormatError(f"missing required key {key!r}")
    if not isinstance(doc["functions"], list):
        raise InstanceFormatError("functions: expected a list")
    try:
        costs = [[float(c) for c in row] for row in doc["costs"]]
    except (TypeError, ValueError):
        raise InstanceFormatError("costs: expected a matrix of numbers") from None
    functions = [function_from_json(f, f"functions[{j}]") for j, f in enumerate(doc["functions"])]
    return Instance(int(doc["agents"]), int(doc["projects"]), costs, functions)


def dumps(instance: Instance) -> str:
    # repr-precision floats make the round trip bit-exact
    return json.dumps(instance_to_json(instance), indent=1) + "\n"


def loads(text: str, *, check: bool = True) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    instance = instance_from_json(doc)
    if check:
        violations = validate(instance)
        if violations:
            raise InstanceValidationError(violations)
    return instance


def save(instance: Instance, path) -> None:
    Path(path).write_text(dumps(instance))


def load(path, *, check: bool = True) -> Instance:
    return loads(Path(path).read_text(), check=check)
