"""Exact expression layer."""
from .expr import ONE, ZERO, Expr, as_expr, diff, is_zero, substitute, total_diff
from .kernels import BACKEND
from .parser import parse_expr
from .poly import MAX_DEGREE, Poly
from .printer import format_expr, format_poly
from .symbols import Symbol, const, free, p, ps, q, qs, symbol_table, u, v, vs

__all__ = [
    "BACKEND", "Expr", "MAX_DEGREE", "ONE", "Poly", "Symbol", "ZERO", "as_expr", "const",
    "diff", "format_expr", "format_poly", "free", "is_zero", "p", "parse_expr", "ps", "q", "qs",
    "substitute", "symbol_table", "total_diff", "u", "v", "vs",
]
