"""LP relaxations: a dense two-phase tableau simplex and a HiGHS backend.

The tableau engine is meant for desk-scale models (a few hundred rows).  The
``"highs"`` engine hands the same arrays to :func:`scipy.optimize.linprog`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from ..milp.model import EQ, GE, LE, Model

OPTIMAL, INFEASIBLE, UNBOUNDED, FAILED = "optimal", "infeasible", "unbounded", "failed"
PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
TABLEAU_MAX_CELLS = 4_000_000


@dataclass
class LpProblem:
    """Array form of a model: minimise ``c x + const`` over ``A x (senses) b``, ``lo <= x <= hi``."""
    c: np.ndarray
    A: sp.csr_matrix
    senses: np.ndarray
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    integer: np.ndarray
    constant: float = 0.0

    @classmethod
    def from_model(cls, model: Model) -> "LpProblem":
        c, A, senses, b, lo, hi, integ = model.to_arrays()
        return cls(c, A, senses, b, lo, hi, integ, model.objective_constant)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def residuals(self, x: np.ndarray) -> np.ndarray:
        """Per-row violation (positive means violated)."""
        ax = self.A @ x
        r = np.zeros_like(ax)
        le, ge, eq = self.senses == LE, self.senses == GE, self.senses == EQ
        r[le] = ax[le] - self.b[le]
        r[ge] = self.b[ge] - ax[ge]
        r[eq] = np.abs(ax[eq] - self.b[eq])
        return r


@dataclass
class LpResult:
    status: str
    objective: float = math.nan
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterations: int = 0
    dual_objective: float = math.nan
    engine: str = ""

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def solve_lp(problem, engine: str = "auto", lower=None, upper=None) -> LpResult:
    """Solve the continuous relaxation of ``problem`` (a Model or LpProblem).

    ``lower``/``upper`` override the variable bounds (branch-and-bound uses
    this).  ``engine`` is ``"simplex"``, ``"highs"`` or ``"auto"`` (simplex
    when the tableau is small).
    """
    if isinstance(problem, Model):
        problem = LpProblem.from_model(problem)
    lo = problem.lo if lower is None else np.asarray(lower, dtype=float)
    hi = problem.hi if upper is None else np.asarray(upper, dtype=float)
    if np.any(lo > hi + 1e-12):
        return LpResult(INFEASIBLE, engine=engine)
    if engine == "auto":
        m, n = problem.shape
        engine = "simplex" if (m + n) * (2 * n + m) <= TABLEAU_MAX_CELLS else "highs"
    if engine == "simplex":
        res = _tableau(problem, lo, hi)
    elif engine == "highs":
        res = _highs(problem, lo, hi)
    else:
        raise ValueError(f"unknown LP engine {engine!r}")
    res.engine = engine
    return res


# -- HiGHS -------------------------------------------------------------------

def _highs(p: LpProblem, lo, hi) -> LpResult:
    le, ge, eq = p.senses == LE, p.senses == GE, p.senses == EQ
    ub_rows = le | ge
    sign = np.where(ge, -1.0, 1.0)
    A_ub = sp.diags(sign[ub_rows]) @ p.A[ub_rows] if ub_rows.any() else None
    b_ub = (sign * p.b)[ub_rows] if ub_rows.any() else None
    A_eq = p.A[eq] if eq.any() else None
    b_eq = p.b[eq] if eq.any() else None
    bounds = np.column_stack([np.where(np.isfinite(lo), lo, -np.inf), np.where(np.isfinite(hi), hi, np.inf)])
    r = linprog(p.c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs",
                options={"primal_feasibility_tolerance": 1e-9, "dual_feasibility_tolerance": 1e-9})
    if r.status == 2:
        return LpResult(INFEASIBLE, iterations=int(r.nit))
    if r.status == 3:
        return LpResult(UNBOUNDED, iterations=int(r.nit))
    if r.status != 0:
        return LpResult(FAILED, iterations=int(getattr(r, "nit", 0)))
    dual = 0.0
    if A_ub is not None:
        dual += float(b_ub @ r.ineqlin.marginals)
    if A_eq is not None:
        dual += float(b_eq @ r.eqlin.marginals)
    ml, mu = r.lower.marginals, r.upper.marginals
    fl, fu = np.isfinite(lo), np.isfinite(hi)
    dual += float(lo[fl] @ ml[fl]) + float(hi[fu] @ mu[fu])
    return LpResult(OPTIMAL, float(r.fun) + p.constant, np.asarray(r.x, dtype=float), int(r.nit),
                    dual + p.constant)


# -- dense tableau ---------------------------------------------------------------

def _standard_form(p: LpProblem, lo, hi):
    """Rewrite as ``min c's y  s.t.  A' y = b', y >= 0`` with ``b' >= 0``.

    Returns the arrays plus the affine map ``x = shift + T y`` back to the
    original variables and the objective constant it introduces.
    """
    A = p.A.toarray()
    m, n = A.shape
    cols, cost, xmap = [], [], []      # xmap: (orig var, sign)
    shift = np.zeros(n)
    ub_rows = []                        # (column index in y, bound)
    for j in range(n):
        l, u = lo[j], hi[j]
        if math.isfinite(l):
            shift[j] = l
            cols.append(A[:, j]); cost.append(p.c[j]); xmap.append((j, 1.0))
            if math.isfinite(u):
                ub_rows.append((len(cols) - 1, u - l))
        elif math.isfinite(u):
            shift[j] = u
            cols.append(-A[:, j]); cost.append(-p.c[j]); xmap.append((j, -1.0))
        else:
            cols.append(A[:, j]); cost.append(p.c[j]); xmap.append((j, 1.0))
            cols.append(-A[:, j]); cost.append(-p.c[j]); xmap.append((j, -1.0))
    ny = len(cols)
    Ay = np.column_stack(cols) if cols else np.zeros((m, 0))
    b = p.b - A @ shift
    const = float(p.c @ shift)
    # bound rows y_k <= u
    if ub_rows:
        U = np.zeros((len(ub_rows), ny))
        for i, (k, _) in enumerate(ub_rows):
            U[i, k] = 1.0
        Ay = np.vstack([Ay, U])
        b = np.concatenate([b, [u for _, u in ub_rows]])
    senses = list(p.senses) + [LE] * len(ub_rows)
    # slacks / surpluses
    mm = Ay.shape[0]
    slack_cols = []
    for i, s in enumerate(senses):
        if s == EQ:
            continue
        col = np.zeros(mm)
        col[i] = 1.0 if s == LE else -1.0
        slack_cols.append(col)
    S = np.column_stack(slack_cols) if slack_cols else np.zeros((mm, 0))
    As = np.hstack([Ay, S])
    cs = np.concatenate([np.array(cost, dtype=float), np.zeros(S.shape[1])])
    neg = b < 0
    As[neg] *= -1
    b = np.where(neg, -b, b)
    return As, b, cs, xmap, shift, ny, const


class _Tableau:
    def __init__(self, A: np.ndarray, b: np.ndarray):
        m, n = A.shape
        self.m, self.n = m, n
        # columns: n structural, m artificial, rhs
        self.T = np.zeros((m + 1, n + m + 1))
        self.T[:m, :n] = A
        self.T[:m, n:n + m] = np.eye(m)
        self.T[:m, -1] = b
        self.basis = np.arange(n, n + m)
        self.iterations = 0

    def set_cost(self, cost: np.ndarray) -> None:
        """Install reduced costs for ``cost`` (length n + m) given the basis."""
        row = np.zeros(self.T.shape[1])
        row[:cost.size] = cost
        cb = row[self.basis]
        row -= cb @ self.T[:self.m]
        self.T[-1] = row

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        T[r] /= T[r, c]
        col = T[:, c].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = c
        self.iterations += 1

    def run(self, allowed: np.ndarray) -> str:
        """Minimise the installed cost over columns flagged ``allowed``."""
        T = self.T
        degenerate = 0
        bland = False
        limit = 10 * (self.m + self.n)
        while True:
            d = T[-1, :-1]
            cand = np.flatnonzero((d < -PIVOT_TOL) & allowed)
            if cand.size == 0:
                return OPTIMAL
            c = int(cand[0]) if bland else int(cand[np.argmin(d[cand])])
            col = T[:-1, c]
            pos = col > PIVOT_TOL
            if not pos.any():
                return UNBOUNDED
            ratios = np.full(self.m, np.inf)
            ratios[pos] = T[:-1, -1][pos] / col[pos]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + PIVOT_TOL * max(1.0, abs(best)))
            r = int(ties[np.argmin(self.basis[ties])]) if bland else int(ties[np.argmax(col[ties])])
            if best <= PIVOT_TOL:
                degenerate += 1
                if degenerate > limit:
                    bland = True
            self.pivot(r, c)
            if self.iterations > 50 * limit:
                return FAILED


def _tableau(p: LpProblem, lo, hi) -> LpResult:
    A, b, cost, xmap, shift, ny, const = _standard_form(p, lo, hi)
    m, n = A.shape
    tab = _Tableau(A, b)
    # phase 1: minimise the sum of artificials
    tab.set_cost(np.concatenate([np.zeros(n), np.ones(m)]))
    allowed = np.ones(n + m, dtype=bool)
    status = tab.run(allowed)
    if status == FAILED or -tab.T[-1, -1] > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
        return LpResult(INFEASIBLE if status != FAILED else FAILED, iterations=tab.iterations)
    # drive artificials out of the basis; drop redundant rows
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if tab.basis[r] >= n:
            nz = np.flatnonzero(np.abs(tab.T[r, :n]) > PIVOT_TOL)
            if nz.size:
                tab.pivot(r, int(nz[0]))
            else:
                keep[r] = False
    if not keep.all():
        rows = np.concatenate([np.flatnonzero(keep), [m]])
        tab.T = tab.T[rows]
        tab.basis = tab.basis[keep]
        tab.m = int(keep.sum())
    # phase 2
    allowed = np.concatenate([np.ones(n, dtype=bool), np.zeros(m, dtype=bool)])
    tab.set_cost(np.concatenate([cost, np.zeros(m)]))
    status = tab.run(allowed)
    if status != OPTIMAL:
        return LpResult(status, iterations=tab.iterations)
    y = np.zeros(n + m)
    y[tab.basis] = tab.T[:-1, -1]
    x = shift.copy()
    for k, (j, sgn) in enumerate(xmap):
        x[j] += sgn * y[k]
    obj = float(p.c @ x) + p.constant
    # duals from B^T w = c_B on the standard form
    B = np.hstack([A, np.eye(m)])[keep][:, tab.basis]
    cb = np.concatenate([cost, np.zeros(m)])[tab.basis]
    try:
        w = np.linalg.solve(B.T, cb)
        dual = float(b[keep] @ w) + const + p.constant
    except np.linalg.LinAlgError:
        dual = math.nan
    return LpResult(OPTIMAL, obj, x, tab.iterations, dual)
