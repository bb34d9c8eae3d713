"""Fraction-free (Bareiss) elimination over the rational-function field.

Pivots must be admissible: nonzero expressions whose numerator is a rational
constant times a product of excluded-locus polynomials.  Any other pivot could
vanish somewhere on the domain, so rather than branching we stop with
``RankNotConstant`` when only such pivots are left.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import RankNotConstant
from .symcore import ONE, ZERO, Expr, Poly


def strip_excluded(poly: Poly, excluded: Sequence[Poly]) -> Poly:
    """Divide out every power of every excluded polynomial."""
    changed = True
    while changed and not poly.is_constant():
        changed = False
        for ex in excluded:
            qt = poly.exact_div(ex)
            if qt is not None:
                poly = qt
                changed = True
    return poly


def is_admissible(e: Expr, excluded: Sequence[Poly] = ()) -> bool:
    if e.is_zero():
        return False
    if e.num.is_constant():
        return True
    return strip_excluded(e.num, excluded).is_constant()


@dataclass
class Elimination:
    nrows: int
    ncols: int
    matrix: list
    rhs: list
    pivots: list = field(default_factory=list)  # (row, col) in elimination order

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def pivot_cols(self) -> list[int]:
        return [c for _, c in self.pivots]

    @property
    def free_cols(self) -> list[int]:
        used = set(self.pivot_cols)
        return [c for c in range(self.ncols) if c not in used]

    def residual_rows(self) -> list[int]:
        used = {r for r, _ in self.pivots}
        return [r for r in range(self.nrows) if r not in used]

    def conditions(self, k: int = 0) -> list[Expr]:
        """Right-hand-side entries of zero rows that do not vanish."""
        out = []
        for r in self.residual_rows():
            val = self.rhs[r][k]
            if not val.is_zero():
                out.append(val)
        return out

    def back_substitute(self, free_values: dict, k: int | None = 0) -> list[Expr]:
        x: list = [None] * self.ncols
        for c in self.free_cols:
            x[c] = free_values.get(c, ZERO)
        for r, c in reversed(self.pivots):
            acc = self.rhs[r][k] if k is not None else ZERO
            row = self.matrix[r]
            for j in range(self.ncols):
                if j == c:
                    continue
                a = row[j]
                if a.is_zero():
                    continue
                acc = acc - a * x[j]
            x[c] = acc / row[c]
        return x


def eliminate(
    matrix: Sequence[Sequence[Expr]],
    rhs: Sequence[Sequence[Expr]] | None = None,
    excluded: Sequence[Poly] = (),
    ncols: int | None = None,
) -> Elimination:
    m = len(matrix)
    n = ncols if ncols is not None else (len(matrix[0]) if m else 0)
    M = [list(row) for row in matrix]
    R = [list(r) for r in rhs] if rhs is not None else [[] for _ in range(m)]
    el = Elimination(m, n, M, R)
    used_rows: set[int] = set()
    used_cols: set[int] = set()
    prev = ONE
    while True:
        choice = None
        pending = False
        for c in range(n):
            if c in used_cols:
                continue
            for r in range(m):
                if r in used_rows:
                    continue
                a = M[r][c]
                if a.is_zero():
                    continue
                if is_admissible(a, excluded):
                    choice = (r, c)
                    break
                pending = True
            if choice:
                break
        if choice is None:
            if pending:
                raise RankNotConstant(
                    "every remaining pivot candidate could vanish on the domain; rank is not constant"
                )
            break
        r, c = choice
        piv = M[r][c]
        prow = M[r]
        prhs = R[r]
        for i in range(m):
            if i in used_rows or i == r:
                continue
            a = M[i][c]
            row = M[i]
            if a.is_zero():
                if prev != ONE or piv != ONE:
                    M[i] = [(piv * x) / prev for x in row]
                    R[i] = [(piv * x) / prev for x in R[i]]
                continue
            M[i] = [
                ZERO if j == c else (piv * row[j] - a * prow[j]) / prev for j in range(n)
            ]
            R[i] = [(piv * R[i][t] - a * prhs[t]) / prev for t in range(len(prhs))]
        used_rows.add(r)
        used_cols.add(c)
        el.pivots.append((r, c))
        prev = piv
    return el


def normalize_vector(vec: list[Expr], excluded: Sequence[Poly] = ()) -> list[Expr]:
    for x in vec:
        if not x.is_zero():
            if is_admissible(x, excluded) and x != ONE:
                return [y / x for y in vec]
            return vec
    return vec


def nullspace(matrix, excluded=(), ncols=None) -> list[list[Expr]]:
    el = eliminate(matrix, None, excluded, ncols)
    return _kernel_from(el, excluded)


def _kernel_from(el: Elimination, excluded) -> list[list[Expr]]:
    basis = []
    for f in el.free_cols:
        vec = el.back_substitute({f: ONE}, k=None)
        basis.append(normalize_vector(vec, excluded))
    return basis


@dataclass
class LinearSolution:
    particular: list | None
    kernel: list
    conditions: list
    rank: int


def solve(matrix, rhs: Sequence[Expr], excluded=(), ncols=None) -> LinearSolution:
    """Solve ``matrix @ x = rhs``; unsolvable rows come back as conditions."""
    el = eliminate(matrix, [[b] for b in rhs], excluded, ncols)
    conds = el.conditions(0)
    particular = el.back_substitute({}, 0)
    kernel = _kernel_from(el, excluded)
    return LinearSolution(particular, kernel, conds, el.rank)


def rank(matrix, excluded=(), ncols=None) -> int:
    if not matrix:
        return 0
    return eliminate(matrix, None, excluded, ncols).rank


def matvec(matrix, vec) -> list[Expr]:
    out = []
    for row in matrix:
        acc = ZERO
        for a, x in zip(row, vec):
            if a.is_zero() or x.is_zero():
                continue
            acc = acc + a * x
        out.append(acc)
    return out


def transpose(matrix):
    return [list(col) for col in zip(*matrix)] if matrix else []
