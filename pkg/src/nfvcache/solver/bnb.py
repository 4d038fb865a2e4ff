"""Best-bound branch-and-bound over the LP relaxation."""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..milp.model import Model
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, LpProblem, solve_lp

INT_TOL = 1e-6
AUTO_MAX_INTEGERS = 40
FEASIBILITY_TOL = 1e-6

MILP_OPTIMAL = "optimal"
MILP_FEASIBLE_GAP = "feasible-gap"
MILP_INFEASIBLE = "infeasible"
MILP_NODE_LIMIT = "node-limit"
MILP_UNBOUNDED = "unbounded"


@dataclass
class MilpResult:
    status: str
    objective: float = math.inf
    bound: float = -math.inf
    values: np.ndarray | None = None
    nodes: int = 0
    lp_iterations: int = 0
    trace: list[tuple[int, float, float]] = field(default_factory=list)
    backend: str = "bnb"

    @property
    def gap(self) -> float:
        if not math.isfinite(self.objective):
            return math.inf
        return max(0.0, (self.objective - self.bound) / max(1.0, abs(self.objective)))

    @property
    def has_solution(self) -> bool:
        return self.values is not None


def relative_gap(incumbent: float, bound: float) -> float:
    return (incumbent - bound) / max(1.0, abs(incumbent))


def _most_fractional(x: np.ndarray, int_ids: np.ndarray) -> int | None:
    f = x[int_ids] - np.floor(x[int_ids])
    dist = np.minimum(f, 1 - f)
    if dist.size == 0 or dist.max() <= INT_TOL:
        return None
    # argmax returns the first (lowest id) among ties
    return int(int_ids[int(np.argmax(dist >= dist.max() - 1e-12))])


def _accept(p: LpProblem, x: np.ndarray, int_ids, lo, hi, engine) -> tuple[np.ndarray, float] | None:
    """Round integers and confirm feasibility; re-solve the continuous part if needed."""
    xr = x.copy()
    xr[int_ids] = np.round(xr[int_ids])
    if (p.residuals(xr).max(initial=0.0) <= FEASIBILITY_TOL
            and np.all(xr >= lo - FEASIBILITY_TOL) and np.all(xr <= hi + FEASIBILITY_TOL)):
        return xr, float(p.c @ xr) + p.constant
    flo, fhi = lo.copy(), hi.copy()
    flo[int_ids] = fhi[int_ids] = xr[int_ids]
    res = solve_lp(p, engine, flo, fhi)
    if res.status != OPTIMAL:
        return None
    y = res.values.copy()
    y[int_ids] = xr[int_ids]
    if p.residuals(y).max(initial=0.0) > FEASIBILITY_TOL:
        return None
    return y, float(p.c @ y) + p.constant


def solve_milp(model, gap_tol: float = 1e-6, node_limit: int | None = 100_000,
               time_limit: float | None = None, engine: str = "auto",
               backend: str = "auto") -> MilpResult:
    """Minimise ``model`` (a Model or LpProblem) with branch-and-bound.

    Nodes are taken best-bound first; from each popped node the search dives
    depth-first (nearest-rounding child first, sibling queued) until the dive
    is pruned.  Branching picks the most fractional integer variable, lowest
    id on ties.  ``backend="highs"`` delegates the whole search to
    :func:`scipy.optimize.milp` instead; ``"auto"`` uses this search up to
    ``AUTO_MAX_INTEGERS`` integer variables and HiGHS beyond.
    """
    p = model if isinstance(model, LpProblem) else LpProblem.from_model(model)
    if backend == "auto":
        backend = "bnb" if int(p.integer.sum()) <= AUTO_MAX_INTEGERS else "highs"
    if backend == "highs":
        from .highs import solve_milp_highs
        return solve_milp_highs(p, gap_tol, time_limit, node_limit)
    if backend != "bnb":
        raise ValueError(f"unknown backend {backend!r}")
    int_ids = np.flatnonzero(p.integer)
    if np.any(~np.isfinite(p.lo[int_ids])) or np.any(~np.isfinite(p.hi[int_ids])):
        raise ValueError("every integer variable needs finite bounds")
    lo0 = p.lo.copy()
    hi0 = p.hi.copy()
    lo0[int_ids] = np.ceil(lo0[int_ids] - INT_TOL)
    hi0[int_ids] = np.floor(hi0[int_ids] + INT_TOL)
    start = time.monotonic()
    result = MilpResult(MILP_INFEASIBLE)
    root = solve_lp(p, engine, lo0, hi0)
    result.lp_iterations += root.iterations
    if root.status == INFEASIBLE:
        return result
    if root.status == UNBOUNDED:
        result.status = MILP_UNBOUNDED
        return result
    if root.status != OPTIMAL:
        raise RuntimeError(f"root relaxation failed ({root.status})")
    inc_val, inc_x = math.inf, None
    bound = root.objective
    heap: list = []
    seq = 0
    heapq.heappush(heap, (root.objective, seq, lo0, hi0, root))
    nodes = 0
    limited = False

    def prune(v: float) -> bool:
        return inc_x is not None and relative_gap(inc_val, v) <= gap_tol

    while heap:
        bound = max(bound, min(inc_val, heap[0][0]))
        result.trace.append((nodes, inc_val, bound))
        if prune(heap[0][0]):
            break
        if (node_limit is not None and nodes >= node_limit) or (
                time_limit is not None and time.monotonic() - start > time_limit):
            limited = True
            break
        node_bound, _, lo, hi, lp = heapq.heappop(heap)
        # dive
        while True:
            nodes += 1
            if prune(lp.objective):
                break
            j = _most_fractional(lp.values, int_ids)
            if j is None:
                acc = _accept(p, lp.values, int_ids, lo, hi, engine)
                if acc is not None and acc[1] < inc_val:
                    inc_x, inc_val = acc
                break
            v = lp.values[j]
            down_hi = hi.copy(); down_hi[j] = math.floor(v)
            up_lo = lo.copy(); up_lo[j] = math.ceil(v)
            children = [(lo, down_hi), (up_lo, hi)]
            if v - math.floor(v) > 0.5:
                children.reverse()
            solved = []
            for clo, chi in children:
                r = solve_lp(p, engine, clo, chi)
                result.lp_iterations += r.iterations
                if r.status == OPTIMAL and not prune(r.objective):
                    solved.append((clo, chi, r))
            if not solved:
                break
            lo, hi, lp = solved[0]
            for clo, chi, r in solved[1:]:
                seq += 1
                heapq.heappush(heap, (r.objective, seq, clo, chi, r))
            if node_limit is not None and nodes >= node_limit:
                seq += 1
                heapq.heappush(heap, (lp.objective, seq, lo, hi, lp))
                break
    if not heap and not limited:
        bound = inc_val if inc_x is not None else bound
    elif heap:
        bound = max(bound, min(inc_val, heap[0][0]))
    result.nodes = nodes
    result.trace.append((nodes, inc_val, bound))
    if inc_x is None:
        result.status = MILP_NODE_LIMIT if limited else MILP_INFEASIBLE
        result.bound = bound
        return result
    result.objective, result.values, result.bound = inc_val, inc_x, min(bound, inc_val)
    if limited and result.gap > gap_tol:
        result.status = MILP_FEASIBLE_GAP
    else:
        result.status = MILP_OPTIMAL
    return result
