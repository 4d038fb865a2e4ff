"""MILP representation, linearisation gadgets, formulation builder and file formats."""

from .check import check_solution
from .formulation import (APPROACHES, BuildError, IndexSets, big_m, build_formulation,
                          decode_solution, encode_solution, expected_variable_count)
from .gadgets import (gadget_activity_link, gadget_and, gadget_gate, gadget_int_frac_split,
                      gadget_or, gadget_product)
from .io import build_report_text, emit_lp, emit_mps, read_mps
from .model import (BINARY, CONTINUOUS, EQ, GE, INTEGER, LE, LinearConstraint, Model,
                    ModelError, Variable, model_from_arrays, parse_label)
from .piecewise import (ConstructionError, PiecewiseSegments, build_piecewise_segments,
                        cache_size, hit_ratio)

__all__ = [
    "APPROACHES", "BINARY", "BuildError", "CONTINUOUS", "ConstructionError", "EQ", "GE",
    "INTEGER", "IndexSets", "LE", "LinearConstraint", "Model", "ModelError",
    "PiecewiseSegments", "Variable", "big_m", "build_formulation", "build_piecewise_segments",
    "build_report_text", "cache_size", "check_solution", "decode_solution", "emit_lp",
    "emit_mps", "encode_solution", "expected_variable_count", "gadget_activity_link",
    "gadget_and", "gadget_gate", "gadget_int_frac_split", "gadget_or", "gadget_product",
    "hit_ratio", "model_from_arrays", "parse_label", "read_mps",
]
