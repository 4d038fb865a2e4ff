"""Free-format MPS and CPLEX-style LP writers, plus an MPS reader for round trips."""

from __future__ import annotations

import math
import re

from .model import BINARY, CONTINUOUS, EQ, GE, INTEGER, LE, Model

OBJ_ROW = "OBJ"
MAX_NAME = 255
_SENSE_MPS = {LE: "L", GE: "G", EQ: "E"}
_MPS_SENSE = {v: k for k, v in _SENSE_MPS.items()}
_NAME_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\((.*)\)$")


def _num(v: float) -> str:
    v = float(v)
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _check_name(name: str) -> str:
    if len(name) > MAX_NAME or any(ch.isspace() for ch in name):
        raise ValueError(f"name {name!r} is not a valid MPS/LP identifier")
    return name


def emit_mps(model: Model) -> str:
    """Free MPS text.  Columns appear in variable-id order; integer columns are
    wrapped in MARKER lines and always carry explicit bounds."""
    lines = [f"NAME {_check_name(model.name)}", "ROWS", f" N  {OBJ_ROW}"]
    for con in model.constraints:
        lines.append(f" {_SENSE_MPS[con.sense]}  {_check_name(con.label)}")
    by_col: list[list[tuple[str, float]]] = [[] for _ in model.variables]
    for con in model.constraints:
        for vid, coef in con.terms:
            by_col[vid].append((con.label, coef))
    lines.append("COLUMNS")
    in_int = False
    marker = 0
    for v in model.variables:
        if v.is_integer != in_int:
            lines.append(f"    MARKER{marker:04d} 'MARKER' '{'INTORG' if not in_int else 'INTEND'}'")
            marker += 1
            in_int = v.is_integer
        entries = []
        if v.id in model.objective:
            entries.append((OBJ_ROW, model.objective[v.id]))
        entries.extend(by_col[v.id])
        if not entries:
            entries.append((OBJ_ROW, 0.0))
        name = _check_name(v.name)
        for row, coef in entries:
            lines.append(f"    {name} {row} {_num(coef)}")
    if in_int:
        lines.append(f"    MARKER{marker:04d} 'MARKER' 'INTEND'")
    lines.append("RHS")
    if model.objective_constant:
        lines.append(f"    RHS {OBJ_ROW} {_num(-model.objective_constant)}")
    for con in model.constraints:
        if con.rhs:
            lines.append(f"    RHS {con.label} {_num(con.rhs)}")
    lines.append("BOUNDS")
    for v in model.variables:
        lines.extend(_mps_bounds(v))
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def _mps_bounds(v) -> list[str]:
    n = v.name
    if v.kind == BINARY:
        out = [f" BV BND {n}"]
        if v.upper < 1:
            out.append(f" UP BND {n} {_num(v.upper)}")
        if v.lower > 0:
            out.append(f" LO BND {n} {_num(v.lower)}")
        return out
    lo, hi = v.lower, v.upper
    if lo == hi:
        return [f" FX BND {n} {_num(lo)}"]
    if lo == -math.inf and hi == math.inf:
        return [f" FR BND {n}"]
    out = []
    if lo == -math.inf:
        out.append(f" MI BND {n}")
    elif lo != 0 or v.kind == INTEGER:
        out.append(f" LO BND {n} {_num(lo)}")
    if hi != math.inf:
        out.append(f" UP BND {n} {_num(hi)}")
    elif v.kind == INTEGER:
        out.append(f" PL BND {n}")
    return out


def read_mps(text: str) -> Model:
    """Parse free MPS written by :func:`emit_mps` (or compatible) into a Model.

    Variable symbols/keys are recovered from ``sym(a,b)`` names, with keys kept
    as strings.
    """
    section = None
    name = "model"
    rows: list[tuple[str, str]] = []
    obj_row = None
    cols: dict[str, dict] = {}
    col_order: list[str] = []
    rhs: dict[str, float] = {}
    in_int = False
    bounds: list[tuple[str, str, float | None]] = []
    for raw in text.splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        tok = raw.split()
        if not raw[0].isspace():
            section = tok[0].upper()
            if section == "NAME" and len(tok) > 1:
                name = tok[1]
            if section == "ENDATA":
                break
            continue
        if section == "ROWS":
            sense, label = tok[0].upper(), tok[1]
            if sense == "N":
                obj_row = obj_row or label
            else:
                rows.append((label, _MPS_SENSE[sense]))
        elif section == "COLUMNS":
            if len(tok) >= 3 and tok[1] == "'MARKER'":
                in_int = tok[2] == "'INTORG'" or tok[2] == "INTORG"
                continue
            col = tok[0]
            if col not in cols:
                cols[col] = {"int": in_int, "coefs": {}}
                col_order.append(col)
            for i in range(1, len(tok) - 1, 2):
                cols[col]["coefs"][tok[i]] = cols[col]["coefs"].get(tok[i], 0.0) + float(tok[i + 1])
        elif section == "RHS":
            for i in range(1, len(tok) - 1, 2):
                rhs[tok[i]] = float(tok[i + 1])
        elif section == "BOUNDS":
            kind, col = tok[0].upper(), tok[2]
            bounds.append((kind, col, float(tok[3]) if len(tok) > 3 else None))
        else:
            raise ValueError(f"unexpected data line outside a section: {raw!r}")
    info = {c: {"kind": INTEGER if cols[c]["int"] else CONTINUOUS,
                "lo": 0.0, "hi": math.inf} for c in col_order}
    for kind, col, val in bounds:
        b = info[col]
        if kind == "BV":
            b.update(kind=BINARY, lo=0.0, hi=1.0)
        elif kind == "LO":
            b["lo"] = val
        elif kind == "UP":
            b["hi"] = val
        elif kind == "FX":
            b["lo"] = b["hi"] = val
        elif kind == "FR":
            b["lo"], b["hi"] = -math.inf, math.inf
        elif kind == "MI":
            b["lo"] = -math.inf
        elif kind == "PL":
            b["hi"] = math.inf
        else:
            raise ValueError(f"unsupported bound type {kind}")
    model = Model(name)
    for c in col_order:
        m = _NAME_RE.match(c)
        sym, key = (m.group(1), tuple(s for s in m.group(2).split(",") if s)) if m else (c, ())
        b = info[c]
        model.add_var(sym, key, b["kind"], b["lo"], b["hi"], name=c)
    col_id = {c: i for i, c in enumerate(col_order)}
    row_terms: dict[str, list] = {label: [] for label, _ in rows}
    obj = []
    for c in col_order:
        for row, coef in cols[c]["coefs"].items():
            if row == obj_row:
                obj.append((col_id[c], coef))
            else:
                row_terms[row].append((col_id[c], coef))
    for label, sense in rows:
        model.add_constraint(row_terms[label], sense, rhs.get(label, 0.0), label)
    model.set_objective(obj, -rhs.get(obj_row, 0.0))
    return model


def _lp_expr(terms, names) -> list[str]:
    parts = []
    for vid, coef in terms:
        sign = "-" if coef < 0 else "+"
        parts.append(f"{sign} {_num(abs(coef))} {names[vid]}")
    if parts and parts[0].startswith("+ "):
        parts[0] = parts[0][2:]
    if not parts and names:
        parts = [f"0 {names[0]}"]
    return parts


def _wrap(head: str, parts: list[str], tail: str = "", width: int = 200) -> list[str]:
    lines, cur = [], head
    for p in parts + ([tail] if tail else []):
        if len(cur) + len(p) + 1 > width:
            lines.append(cur)
            cur = "   " + p
        else:
            cur = f"{cur} {p}" if cur.strip() else f"{cur}{p}"
    lines.append(cur)
    return lines


def emit_lp(model: Model) -> str:
    """CPLEX-style LP text (Minimize / Subject To / Bounds / Generals / Binaries / End)."""
    names = [_check_name(v.name) for v in model.variables]
    lines = [f"\\ Problem: {model.name}", "Minimize"]
    parts = _lp_expr(sorted(model.objective.items()), names)
    if model.objective_constant:
        c = model.objective_constant
        parts.append(f"{'-' if c < 0 else '+'} {_num(abs(c))}")
    lines += _wrap(" obj:", parts)
    lines.append("Subject To")
    for con in model.constraints:
        lhs = _lp_expr(con.terms, names)
        lines += _wrap(f" {_check_name(con.label)}:", lhs, f"{con.sense} {_num(con.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        if v.kind == BINARY and (v.lower, v.upper) == (0, 1):
            continue
        n = names[v.id]
        if v.lower == v.upper:
            lines.append(f" {n} = {_num(v.lower)}")
        elif v.lower == -math.inf and v.upper == math.inf:
            lines.append(f" {n} free")
        else:
            lo = "-inf" if v.lower == -math.inf else _num(v.lower)
            hi = "+inf" if v.upper == math.inf else _num(v.upper)
            lines.append(f" {lo} <= {n} <= {hi}")
    gens = [names[v.id] for v in model.variables if v.kind == INTEGER]
    bins = [names[v.id] for v in model.variables if v.kind == BINARY]
    if gens:
        lines.append("Generals")
        lines += _wrap("", gens)
    if bins:
        lines.append("Binaries")
        lines += _wrap("", bins)
    lines.append("End")
    return "\n".join(lines) + "\n"


def build_report_text(model: Model) -> str:
    """The build report as ``key = value`` lines, one per entry, sorted."""
    out = [f"model = {model.name}"]
    for key in sorted(model.report):
        val = model.report[key]
        if isinstance(val, dict):
            for k in sorted(val):
                out.append(f"{key}.{k} = {val[k]}")
        elif isinstance(val, list):
            for i, item in enumerate(val):
                out.append(f"{key}[{i}] = {item}")
        else:
            out.append(f"{key} = {val}")
    return "\n".join(out) + "\n"
