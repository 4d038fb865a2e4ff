"""Exhaustive truth tables for the linearisation gadgets.

Each row of a gadget is evaluated by plain arithmetic: with every variable but
one fixed, a row bounds the free variable on one side, so intersecting the
rows gives the exact feasible interval of that variable.
"""

import itertools
import math

from nfvcache.milp import (BINARY, CONTINUOUS, EQ, GE, LE, Model, gadget_activity_link,
                           gadget_and, gadget_gate, gadget_or, gadget_product)

GRID = [i / 10 for i in range(11)]
TOL = 1e-9
BIG = 10.0


def interval(model, fixed, free):
    """Feasible [lo, hi] of variable ``free`` given values for all others, or None."""
    v = model.variables[free]
    lo, hi = v.lower, v.upper
    for row in model.constraints:
        a = 0.0
        rest = 0.0
        for vid, c in row.terms:
            if vid == free:
                a += c
            else:
                rest += c * fixed[vid]
        rhs = row.rhs - rest
        if a == 0.0:
            ok = {LE: 0 <= rhs + TOL, GE: 0 >= rhs - TOL, EQ: abs(rhs) <= TOL}[row.sense]
            if not ok:
                return None
            continue
        bound = rhs / a
        sense = row.sense
        if a < 0 and sense != EQ:
            sense = GE if sense == LE else LE
        if sense in (LE, EQ):
            hi = min(hi, bound)
        if sense in (GE, EQ):
            lo = max(lo, bound)
    if lo > hi + TOL:
        return None
    return lo, hi


def binary_values(model, fixed, free):
    """Which of 0/1 the binary ``free`` may take."""
    out = []
    for b in (0, 1):
        vals = dict(fixed)
        vals[free] = b
        if all(_holds(row, vals) for row in model.constraints):
            out.append(b)
    return out


def _holds(row, vals):
    lhs = sum(c * vals[vid] for vid, c in row.terms)
    return {LE: lhs <= row.rhs + TOL, GE: lhs >= row.rhs - TOL,
            EQ: abs(lhs - row.rhs) <= TOL}[row.sense]


def check_and():
    m = Model()
    a, b = m.add_var("a", (), BINARY), m.add_var("b", (), BINARY)
    out = gadget_and(m, a, b)
    return [f"and({x},{y}) -> {got}" for x, y in itertools.product((0, 1), repeat=2)
            if (got := binary_values(m, {a: x, b: y}, out)) != [x & y]]


def check_or():
    m = Model()
    a, b = m.add_var("a", (), BINARY), m.add_var("b", (), BINARY)
    out = gadget_or(m, a, b)
    return [f"or({x},{y}) -> {got}" for x, y in itertools.product((0, 1), repeat=2)
            if (got := binary_values(m, {a: x, b: y}, out)) != [x | y]]


def check_activity_link():
    # positive flow forces the indicator on, zero flow forces it off
    m = Model()
    x = m.add_var("x", (), CONTINUOUS, 0, 1)
    s = m.add_var("sig", (), BINARY)
    gadget_activity_link(m, x, s, BIG)
    bad = []
    for xv in GRID:
        got = binary_values(m, {x: xv}, s)
        if got != [1 if xv > 0 else 0]:
            bad.append(f"activity(x={xv}) -> {got}")
    return bad


def check_product():
    m = Model()
    s = m.add_var("sig", (), BINARY)
    d = m.add_var("delta", (), CONTINUOUS, 0, 1)
    out = gadget_product(m, s, d)
    bad = []
    for sv, dv in itertools.product((0, 1), GRID):
        want = dv if sv else 0.0
        iv = interval(m, {s: sv, d: dv}, out)
        if iv is None or abs(iv[0] - want) > TOL or abs(iv[1] - want) > TOL:
            bad.append(f"product(sig={sv}, delta={dv}) -> {iv}")
    return bad


def check_gate():
    m = Model()
    src = m.add_var("src", (), CONTINUOUS, 0, BIG)
    routed = m.add_var("routed", (), CONTINUOUS, 0, math.inf)
    s = m.add_var("sig", (), BINARY)
    gadget_gate(m, routed, src, s, BIG)
    bad = []
    for sv, frac in itertools.product((0, 1), GRID):
        lv = frac * BIG
        want = lv if sv else 0.0
        iv = interval(m, {s: sv, src: lv}, routed)
        if iv is None or abs(iv[0] - want) > TOL or abs(iv[1] - want) > TOL:
            bad.append(f"gate(sig={sv}, source={lv}) -> {iv}")
    return bad


CHECKS = {"and": check_and, "or": check_or, "activity_link": check_activity_link,
          "product": check_product, "gate": check_gate}


def all_deviations():
    return [d for check in CHECKS.values() for d in check()]
