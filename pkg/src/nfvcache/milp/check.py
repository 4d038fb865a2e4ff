"""Feasibility check of a dense assignment against every row, bound and integrality."""

from __future__ import annotations

import math

import numpy as np

from .model import EQ, GE, LE, Model


def check_solution(model: Model, assignment, tol: float = 1e-6) -> list[tuple[str, float]]:
    """Violations beyond ``tol`` as ``(label, residual)`` pairs.

    Rows report their own label; bound and integrality violations report
    ``"bound(<var>)"`` and ``"integer(<var>)"``.  Residuals are positive.
    """
    x = np.asarray(assignment, dtype=float)
    if x.shape != (model.n_vars,):
        raise ValueError(f"assignment has {x.size} values, model has {model.n_vars} variables")
    if not np.all(np.isfinite(x)):
        missing = [model.variables[i].name for i in np.flatnonzero(~np.isfinite(x))[:5]]
        raise ValueError(f"assignment missing values for {', '.join(missing)}")
    out = []
    for v in model.variables:
        val = x[v.id]
        excess = max(v.lower - val, val - v.upper, 0.0)
        if excess > tol:
            out.append((f"bound({v.name})", excess))
        if v.is_integer and abs(val - round(val)) > tol:
            out.append((f"integer({v.name})", abs(val - round(val))))
    for con in model.constraints:
        lhs = math.fsum(c * x[i] for i, c in con.terms)
        if con.sense == LE:
            r = lhs - con.rhs
        elif con.sense == GE:
            r = con.rhs - lhs
        else:
            r = abs(lhs - con.rhs)
        if r > tol:
            out.append((con.label, r))
    return out
