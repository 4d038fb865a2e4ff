"""Exhaustive enumeration over a subset of binaries, with a solved completion."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..milp.model import BINARY, Model
from .simplex import OPTIMAL, LpProblem, solve_lp

MAX_SUBSET = 25


class OracleRefusal(ValueError):
    pass


@dataclass
class OracleResult:
    status: str
    objective: float = math.inf
    values: np.ndarray | None = None
    evaluated: int = 0


def enumerate_oracle(model, binary_subset=None, engine: str = "highs",
                     completion: str = "lp") -> OracleResult:
    """Global optimum over every 0/1 assignment of ``binary_subset``.

    Each assignment's completion is an LP (``completion="lp"``; exact when no
    other integer variables remain) or, with ``completion="milp"``, a MILP
    over the remaining integers solved by HiGHS.  By default the completion
    LP uses HiGHS so the oracle does not share an LP engine with the tableau
    simplex.
    """
    if isinstance(model, Model):
        kinds = np.array([v.kind == BINARY for v in model.variables])
        p = LpProblem.from_model(model)
    else:
        p = model
        kinds = p.integer & (p.lo >= 0) & (p.hi <= 1)
    subset = np.flatnonzero(kinds) if binary_subset is None else np.asarray(list(binary_subset), dtype=int)
    if subset.size > MAX_SUBSET:
        raise OracleRefusal(f"refusing to enumerate {subset.size} binaries (limit {MAX_SUBSET})")
    if completion not in ("lp", "milp"):
        raise ValueError(f"unknown completion {completion!r}")
    best = OracleResult("infeasible")
    for bits in itertools.product((0.0, 1.0), repeat=subset.size):
        lo, hi = p.lo.copy(), p.hi.copy()
        b = np.array(bits)
        if np.any(b < lo[subset] - 1e-12) or np.any(b > hi[subset] + 1e-12):
            continue
        lo[subset] = hi[subset] = b
        best.evaluated += 1
        if completion == "lp":
            r = solve_lp(p, engine, lo, hi)
            ok, obj, x = r.status == OPTIMAL, r.objective, r.values
        else:
            from .highs import solve_milp_highs
            sub = LpProblem(p.c, p.A, p.senses, p.b, lo, hi, p.integer, p.constant)
            r = solve_milp_highs(sub)
            ok, obj, x = r.has_solution and r.status == "optimal", r.objective, r.values
        if ok and obj < best.objective - 1e-12:
            best.status, best.objective, best.values = OPTIMAL, obj, x
    return best
