"""Linearisation gadgets: each adds its auxiliary variable (if any) and rows to a model.

Every constructor takes the ``labels`` to stamp on the rows it adds and the
index ``key`` appended to those labels, so callers can reuse a gadget for
several constraint families.
"""

from __future__ import annotations

import math
from typing import Sequence

from .model import BINARY, CONTINUOUS, EQ, GE, INTEGER, LE, Model, ModelError

DEFAULT_FRACTION_EPS = 1e-6


def _label(prefix: str, key: Sequence) -> str:
    return f"{prefix}({','.join(str(k) for k in key)})"


def _require_binary(model: Model, *vids: int) -> None:
    for vid in vids:
        v = model.variables[vid]
        if v.kind != BINARY:
            raise ModelError(f"{v.name} must be binary for this gadget")


def _terms(x) -> list[tuple[int, float]]:
    """Accept a variable id or a list of (id, coef) terms."""
    if isinstance(x, int):
        return [(x, 1.0)]
    return list(x)


def gadget_and(model: Model, a: int, b: int, out: int | None = None, key: Sequence = (),
               labels=("C21", "C22", "C23"), symbol: str = "psi") -> int:
    """``out = a AND b`` for binaries."""
    _require_binary(model, a, b)
    if out is None:
        out = model.add_var(symbol, key, BINARY)
    model.add_constraint([(out, 1), (a, -1)], LE, 0, _label(labels[0], key))
    model.add_constraint([(out, 1), (b, -1)], LE, 0, _label(labels[1], key))
    model.add_constraint([(out, 1), (a, -1), (b, -1)], GE, -1, _label(labels[2], key))
    return out


def gadget_or(model: Model, a: int, b: int, out: int | None = None, key: Sequence = (),
              labels=("C25", "C26", "C27"), symbol: str = "sig_x") -> int:
    """``out = a OR b`` for binaries."""
    _require_binary(model, a, b)
    if out is None:
        out = model.add_var(symbol, key, BINARY)
    model.add_constraint([(out, 1), (a, -1), (b, -1)], LE, 0, _label(labels[0], key))
    model.add_constraint([(out, 1), (a, -1)], GE, 0, _label(labels[1], key))
    model.add_constraint([(out, 1), (b, -1)], GE, 0, _label(labels[2], key))
    return out


def gadget_activity_link(model: Model, x, sigma: int, big_m: float, key: Sequence = (),
                         labels=("C15", "C16")) -> None:
    """Tie binary ``sigma`` to the activity of non-negative ``x``.

    Adds ``M*x >= sigma`` and ``x <= M*sigma``: positive ``x`` forces
    ``sigma = 1``; zero ``x`` forces ``sigma = 0``.  ``x`` may be a variable
    id or a list of ``(id, coef)`` terms.
    """
    if not big_m > 0:
        raise ModelError("big-M must be positive")
    _require_binary(model, sigma)
    xt = _terms(x)
    model.add_constraint([(v, big_m * c) for v, c in xt] + [(sigma, -1)], GE, 0,
                         _label(labels[0], key))
    model.add_constraint(xt + [(sigma, -big_m)], LE, 0, _label(labels[1], key))


def gadget_product(model: Model, sigma: int, delta: int, out: int | None = None,
                   key: Sequence = (), labels=("C33", "C34", "C35", "C36"),
                   symbol: str = "theta") -> int:
    """``out = sigma * delta`` for binary ``sigma`` and ``delta`` in [0, 1].

    The third row is ``out >= delta - (1 - sigma)`` (the McCormick lower
    bound); together with ``out <= sigma`` and ``out <= delta`` it pins ``out``
    to the product at every feasible point.
    """
    _require_binary(model, sigma)
    d = model.variables[delta]
    if d.lower < 0 or d.upper > 1:
        raise ModelError(f"{d.name} must be bounded in [0, 1]")
    if out is None:
        out = model.add_var(symbol, key, CONTINUOUS, 0.0, 1.0)
    model.add_constraint([(out, 1), (sigma, -1)], LE, 0, _label(labels[0], key))
    model.add_constraint([(out, 1), (delta, -1)], LE, 0, _label(labels[1], key))
    model.add_constraint([(out, 1), (delta, -1), (sigma, -1)], GE, -1, _label(labels[2], key))
    model.add_constraint([(out, 1)], GE, 0, _label(labels[3], key))
    return out


def gadget_gate(model: Model, routed: int, source: int, sigma: int, mu: float,
                key: Sequence = (), labels=("C41", "C42", "C43", "C44")) -> None:
    """``routed = source`` when ``sigma = 1`` and ``0`` otherwise."""
    if not mu > 0:
        raise ModelError("big-M must be positive")
    _require_binary(model, sigma)
    model.add_constraint([(routed, 1), (sigma, -mu)], LE, 0, _label(labels[0], key))
    model.add_constraint([(routed, 1), (source, -1)], LE, 0, _label(labels[1], key))
    model.add_constraint([(routed, 1), (source, -1), (sigma, -mu)], GE, -mu, _label(labels[2], key))
    model.add_constraint([(routed, 1)], GE, 0, _label(labels[3], key))


def gadget_int_frac_split(model: Model, x, upper: float, key: Sequence = (),
                          label: str = "C53", symbols=("x_i", "x_f"), constant: float = 0.0,
                          eps: float = DEFAULT_FRACTION_EPS, int_var: int | None = None,
                          frac_var: int | None = None) -> tuple[int, int]:
    """Split the expression ``x + constant`` into integer and fractional parts.

    The fraction is bounded by ``1 - eps`` because a strict ``< 1`` cannot be
    expressed.  Returns ``(int_id, frac_id)``.
    """
    if not math.isfinite(upper):
        raise ModelError("integer/fraction split needs a bounded expression")
    if int_var is None:
        int_var = model.add_var(symbols[0], key, INTEGER, 0, math.floor(upper))
    if frac_var is None:
        frac_var = model.add_var(symbols[1], key, CONTINUOUS, 0, 1 - eps)
    model.add_constraint([(int_var, 1), (frac_var, 1)] + [(v, -c) for v, c in _terms(x)],
                         EQ, constant, _label(label, key))
    return int_var, frac_var
