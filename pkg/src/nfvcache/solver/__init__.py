"""Exact optimisation: LP relaxations, branch-and-bound and an enumeration oracle."""

from .bnb import (MILP_FEASIBLE_GAP, MILP_INFEASIBLE, MILP_NODE_LIMIT, MILP_OPTIMAL,
                  MilpResult, relative_gap, solve_milp)
from .oracle import MAX_SUBSET, OracleRefusal, OracleResult, enumerate_oracle
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, LpProblem, LpResult, solve_lp

__all__ = [
    "INFEASIBLE", "LpProblem", "LpResult", "MAX_SUBSET", "MILP_FEASIBLE_GAP", "MILP_INFEASIBLE",
    "MILP_NODE_LIMIT", "MILP_OPTIMAL", "MilpResult", "OPTIMAL", "OracleRefusal", "OracleResult",
    "UNBOUNDED", "enumerate_oracle", "relative_gap", "solve_lp", "solve_milp",
]
