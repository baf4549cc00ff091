"""Approximately revenue-optimal linear contracts for agents spread over several projects."""
from .errors import (
    ColumnBudgetExceeded,
    ContractError,
    GuardExceeded,
    InstanceFormatError,
    InstanceValidationError,
    PreconditionError,
    RoundingError,
    SimplexError,
    UnsupportedOracle,
    ZeroMarginal,
)
from .instance import XOS, Additive, Allocation, BudgetAdditive, Coverage, Instance, Params, load, loads, save
from .oracles import demand, marginal, value
from .capped_demand import CappedQuery, capped_demand, capped_demand_submodular
from .matching import dominant_matching, max_weight_matching
from .lp_engine import Column, DualPoint, FractionalSolution, estimate_grid, separation_oracle, solve_lp1
from .rounding import SupportDistribution, to_distributions, val
from .rounding import round as round_distribution
from .scaling import ScalingInput, apply_scaling, scale
from .pipeline import ContractReport, revenue, solve, solve_exact
from .generate import GenSpec, generate
