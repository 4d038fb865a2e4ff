"""Solver-agnostic MILP container."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from ..topology import NodeId

CONTINUOUS, BINARY, INTEGER = "C", "B", "I"
LE, GE, EQ = "<=", ">=", "="


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Variable:
    id: int
    name: str
    kind: str = CONTINUOUS
    lower: float = 0.0
    upper: float = math.inf

    @property
    def is_integer(self) -> bool:
        return self.kind in (BINARY, INTEGER)


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple[tuple[int, float], ...]
    sense: str
    rhs: float
    label: str


_LABEL_RE = re.compile(r"^([A-Z]+)(\d*)([a-z]*)\((.*)\)$")


def parse_label(label: str) -> tuple[str, tuple[str, ...]]:
    """``"C38(olt0,rrh1)"`` -> ``("C38", ("olt0", "rrh1"))``."""
    m = _LABEL_RE.match(label)
    if not m:
        raise ValueError(f"unparseable constraint label {label!r}")
    idx = tuple(s for s in m.group(4).split(",") if s)
    return m.group(1) + m.group(2) + m.group(3), idx


def var_name(symbol: str, key: Sequence) -> str:
    return f"{symbol}({','.join(str(k) for k in key)})"


@dataclass
class Model:
    """Variables, linear rows and a minimisation objective.

    ``index`` maps ``(symbol, key)`` to variable ids, where ``key`` is a tuple of
    node ids (or other hashables) for model symbols.  ``report`` collects
    free-form build metadata (counts, big-M values, piecewise coefficients).
    """

    name: str = "model"
    variables: list[Variable] = field(default_factory=list)
    constraints: list[LinearConstraint] = field(default_factory=list)
    objective: dict[int, float] = field(default_factory=dict)
    objective_constant: float = 0.0
    index: dict[tuple, int] = field(default_factory=dict)
    report: dict = field(default_factory=dict)
    _labels: set = field(default_factory=set, repr=False)

    # -- building ---------------------------------------------------------
    def add_var(self, symbol: str, key: Sequence = (), kind: str = CONTINUOUS,
                lower: float = 0.0, upper: float = math.inf, name: str | None = None) -> int:
        key = tuple(key)
        if (symbol, key) in self.index:
            raise ModelError(f"duplicate variable {symbol}{key}")
        if kind == BINARY:
            lower, upper = max(lower, 0.0), min(upper, 1.0)
        if lower > upper:
            raise ModelError(f"{symbol}{key}: lower bound {lower} above upper {upper}")
        vid = len(self.variables)
        self.variables.append(Variable(vid, name or var_name(symbol, key), kind, float(lower), float(upper)))
        self.index[(symbol, key)] = vid
        return vid

    def var(self, symbol: str, *key) -> int:
        return self.index[(symbol, tuple(key))]

    def has(self, symbol: str, *key) -> bool:
        return (symbol, tuple(key)) in self.index

    def add_constraint(self, terms: Iterable[tuple[int, float]], sense: str, rhs: float,
                       label: str) -> LinearConstraint:
        if sense not in (LE, GE, EQ):
            raise ModelError(f"bad sense {sense!r}")
        if label in self._labels:
            raise ModelError(f"duplicate constraint label {label}")
        merged: dict[int, float] = {}
        for vid, coef in terms:
            if not 0 <= vid < len(self.variables):
                raise ModelError(f"{label}: undeclared variable id {vid}")
            if not math.isfinite(coef):
                raise ModelError(f"{label}: non-finite coefficient")
            merged[vid] = merged.get(vid, 0.0) + coef
        con = LinearConstraint(tuple((k, v) for k, v in merged.items() if v != 0.0),
                               sense, float(rhs), label)
        self._labels.add(label)
        self.constraints.append(con)
        return con

    def set_objective(self, terms: Iterable[tuple[int, float]], constant: float = 0.0) -> None:
        obj: dict[int, float] = {}
        for vid, coef in terms:
            obj[vid] = obj.get(vid, 0.0) + coef
        self.objective = {k: v for k, v in sorted(obj.items()) if v != 0.0}
        self.objective_constant = float(constant)

    def fix(self, vid: int, value: float) -> None:
        v = self.variables[vid]
        self.variables[vid] = Variable(v.id, v.name, v.kind, value, value)

    # -- queries ----------------------------------------------------------
    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    @property
    def integer_ids(self) -> list[int]:
        return [v.id for v in self.variables if v.is_integer]

    def symbol_of(self, vid: int) -> tuple:
        if not hasattr(self, "_reverse") or len(self._reverse) != len(self.index):
            self._reverse = {v: k for k, v in self.index.items()}
        return self._reverse[vid]

    def objective_value(self, values: Sequence[float] | np.ndarray) -> float:
        return self.objective_constant + sum(c * values[i] for i, c in self.objective.items())

    def counts_by_symbol(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for sym, _ in self.index:
            out[sym] = out.get(sym, 0) + 1
        return out

    def to_arrays(self):
        """Dense-free matrix view: ``(c, A, senses, b, lower, upper, integrality)``.

        ``A`` is CSR; ``senses`` is an array of ``"<=", ">=", "="``.
        """
        n = self.n_vars
        c = np.zeros(n)
        for i, v in self.objective.items():
            c[i] = v
        rows, cols, vals = [], [], []
        for r, con in enumerate(self.constraints):
            for vid, coef in con.terms:
                rows.append(r)
                cols.append(vid)
                vals.append(coef)
        A = sp.csr_matrix((vals, (rows, cols)), shape=(len(self.constraints), n))
        senses = np.array([con.sense for con in self.constraints], dtype=object)
        b = np.array([con.rhs for con in self.constraints], dtype=float)
        lo = np.array([v.lower for v in self.variables])
        hi = np.array([v.upper for v in self.variables])
        integ = np.array([v.is_integer for v in self.variables], dtype=bool)
        return c, A, senses, b, lo, hi, integ

    def values_by_name(self, values) -> dict[str, float]:
        return {v.name: float(values[v.id]) for v in self.variables}


def model_from_arrays(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None,
                      integrality=None, name: str = "arrays") -> Model:
    """Build a :class:`Model` from ``linprog``-style arrays (used by tests and oracles)."""
    c = np.asarray(c, dtype=float)
    n = c.size
    m = Model(name)
    integrality = np.zeros(n, dtype=int) if integrality is None else np.asarray(integrality)
    for j in range(n):
        lo, hi = (0.0, math.inf) if bounds is None else bounds[j]
        lo = -math.inf if lo is None else lo
        hi = math.inf if hi is None else hi
        kind = CONTINUOUS
        if integrality[j]:
            kind = BINARY if (lo, hi) == (0, 1) else INTEGER
        m.add_var("x", (j,), kind, lo, hi)
    for blockname, A, b, sense in (("U", A_ub, b_ub, LE), ("E", A_eq, b_eq, EQ)):
        if A is None:
            continue
        A = np.atleast_2d(np.asarray(A, dtype=float))
        for i, row in enumerate(A):
            m.add_constraint([(j, a) for j, a in enumerate(row) if a != 0], sense, b[i],
                             f"{blockname}({i})")
    m.set_objective(enumerate(c))
    return m
