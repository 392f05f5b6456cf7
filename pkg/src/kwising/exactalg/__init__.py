"""Exact scalar, polynomial and linear-algebra kernels."""

from .gaussrat import GaussRat, unit_power
from .gf2 import GF2Reducer, bit_list, bits_from, gf2_rank, gf2_solve
from .linalg import (
    SYMBOLIC_DET_THRESHOLD,
    CapacityError,
    NotASquareError,
    SkewMat,
    SquareMat,
    det,
    det_field,
    pfaffian,
    pfaffian_field,
    pfaffian_numeric,
    pfaffian_numeric_log,
    series_inverse,
    series_sqrt,
    series_sqrt_residual,
)
from .poly import GPoly, parse_poly

__all__ = [
    "GaussRat", "unit_power", "GF2Reducer", "bit_list", "bits_from", "gf2_rank", "gf2_solve",
    "SYMBOLIC_DET_THRESHOLD", "CapacityError", "NotASquareError", "SkewMat", "SquareMat",
    "det", "det_field", "pfaffian", "pfaffian_field", "pfaffian_numeric", "pfaffian_numeric_log", "series_inverse",
    "series_sqrt", "series_sqrt_residual", "GPoly", "parse_poly",
]
