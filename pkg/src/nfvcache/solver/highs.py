"""Whole-model MILP solve through :func:`scipy.optimize.milp` (HiGHS)."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from ..milp.model import GE, LE
from .bnb import (MILP_FEASIBLE_GAP, MILP_INFEASIBLE, MILP_NODE_LIMIT, MILP_OPTIMAL,
                  MILP_UNBOUNDED, MilpResult)
from .simplex import LpProblem


def solve_milp_highs(p: LpProblem, gap_tol: float = 1e-6, time_limit: float | None = None,
                     node_limit: int | None = None) -> MilpResult:
    lb = np.where(p.senses == LE, -np.inf, p.b)
    ub = np.where(p.senses == GE, np.inf, p.b)
    opts = {"mip_rel_gap": gap_tol, "presolve": True}
    if time_limit is not None:
        opts["time_limit"] = time_limit
    if node_limit is not None:
        opts["node_limit"] = node_limit
    r = milp(p.c, constraints=LinearConstraint(p.A, lb, ub), bounds=Bounds(p.lo, p.hi),
             integrality=p.integer.astype(int), options=opts)
    res = MilpResult(MILP_INFEASIBLE, backend="highs")
    bound = getattr(r, "mip_dual_bound", None)
    res.nodes = int(getattr(r, "mip_node_count", 0) or 0)
    if r.status == 2:
        return res
    if r.status == 3:
        res.status = MILP_UNBOUNDED
        return res
    if r.x is None:
        res.status = MILP_NODE_LIMIT
        return res
    x = np.asarray(r.x, dtype=float)
    ids = np.flatnonzero(p.integer)
    x[ids] = np.round(x[ids])
    res.values = x
    res.objective = float(p.c @ x) + p.constant
    res.bound = (float(bound) + p.constant) if bound is not None and math.isfinite(bound) else res.objective
    res.bound = min(res.bound, res.objective)
    res.status = MILP_OPTIMAL if r.status == 0 else MILP_FEASIBLE_GAP
    res.trace.append((res.nodes, res.objective, res.bound))
    return res
