"""Charts, two-forms, Poisson brackets and linear solves for vector fields."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import linalg
from .errors import NonSolvableConstraint
from .symcore import ONE, ZERO, Expr, Poly, Symbol, free, ps, qs
from .symcore.printer import format_expr


class Chart:
    """Free coordinates of a submanifold plus a solved map for the eliminated variables."""

    __slots__ = ("coords", "solved", "excluded", "_map")

    def __init__(self, coords: Iterable[Symbol], solved=(), excluded: Iterable[Poly] = ()):
        self.coords = tuple(coords)
        self.solved = tuple((s, e) for s, e in (solved.items() if isinstance(solved, dict) else solved))
        self.excluded = tuple(excluded)
        self._map = dict(self.solved)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def solved_map(self) -> dict:
        return self._map

    def restrict(self, e: Expr) -> Expr:
        return e.subs(self._map)

    def value_of(self, s: Symbol) -> Expr:
        got = self._map.get(s)
        return got if got is not None else Expr.sym(s)

    def embedding(self, ambient: Sequence[Symbol]) -> list[Expr]:
        return [self.value_of(s) for s in ambient]

    def jacobian(self, ambient: Sequence[Symbol]) -> list[list[Expr]]:
        """d(ambient)/d(coords), one row per ambient variable."""
        emb = self.embedding(ambient)
        return [[e.diff(c) for c in self.coords] for e in emb]

    def ambient_vector(self, components: Sequence[Expr], ambient: Sequence[Symbol]) -> list[Expr]:
        """Push chart components forward to ambient components (chain rule)."""
        jac = self.jacobian(ambient)
        return linalg.matvec(jac, components)

    def absorb(self, constraint: Expr, preference: Sequence[str]) -> tuple["Chart", Symbol] | None:
        """Solve ``constraint = 0`` for one chart coordinate.

        Returns ``None`` if the constraint already vanishes on the chart.
        """
        r = self.restrict(constraint)
        if r.is_zero():
            return None
        rank = {k: i for i, k in enumerate(preference)}
        candidates = sorted(
            (c for c in self.coords if c.kind in rank), key=lambda c: (rank[c.kind], c.index)
        )
        num = r.num
        for x in candidates:
            if num.degree_in([x]) != 1:
                continue
            parts = num.coefficients_in([x])
            a = parts.get(((x, 1),), Poly())
            b = parts.get((), Poly())
            a_e = Expr(a)
            if not linalg.is_admissible(a_e, self.excluded):
                continue
            sol = Expr(-b) / a_e
            bind = {x: sol}
            solved = [(s, e.subs(bind)) for s, e in self.solved] + [(x, sol)]
            coords = [c for c in self.coords if c != x]
            return Chart(coords, solved, self.excluded), x
        raise NonSolvableConstraint(
            f"constraint {format_expr(r)} is not affine in any free coordinate with admissible coefficient"
        )

    def to_json(self) -> dict:
        return {
            "coords": [c.display() for c in self.coords],
            "solved": {s.display(): format_expr(e) for s, e in self.solved},
        }


def full_chart(n: int, excluded=()) -> Chart:
    return Chart(qs(n) + ps(n), (), excluded)


@dataclass
class TwoForm:
    chart: Chart
    matrix: list  # matrix[i][j] = w(d/dx_i, d/dx_j)

    def is_antisymmetric(self) -> bool:
        n = len(self.matrix)
        return all(
            (self.matrix[i][j] + self.matrix[j][i]).is_zero() for i in range(n) for j in range(n)
        )

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.matrix for x in row)

    def contraction_matrix(self) -> list:
        """Matrix A with (i_X w)_j = sum_i A[j][i] X^i."""
        return linalg.transpose(self.matrix)

    def terms(self) -> list[tuple[Symbol, Symbol, Expr]]:
        out = []
        n = len(self.matrix)
        for i in range(n):
            for j in range(i + 1, n):
                if not self.matrix[i][j].is_zero():
                    out.append((self.chart.coords[i], self.chart.coords[j], self.matrix[i][j]))
        return out


@dataclass
class OneForm:
    chart: Chart
    components: list


@dataclass
class VectorFieldSolution:
    chart: Chart
    particular: list
    kernel_basis: list
    free_params: list

    def general(self) -> list[Expr]:
        out = list(self.particular)
        for f, k in zip(self.free_params, self.kernel_basis):
            fe = Expr.sym(f)
            out = [a + fe * b for a, b in zip(out, k)]
        return out

    def ambient(self, ambient: Sequence[Symbol]) -> list[Expr]:
        return self.chart.ambient_vector(self.general(), ambient)

    def to_json(self) -> dict:
        return {
            "coords": [c.display() for c in self.chart.coords],
            "particular": [format_expr(x) for x in self.particular],
            "kernel": [[format_expr(x) for x in k] for k in self.kernel_basis],
            "free_params": [f.display() for f in self.free_params],
            "general": [format_expr(x) for x in self.general()],
        }


@dataclass
class UnsolvableConditions:
    conditions: list = field(default_factory=list)


def poisson_bracket(f: Expr, g: Expr, n: int) -> Expr:
    out = ZERO
    for qa, pa in zip(qs(n), ps(n)):
        a = f.diff(qa)
        if not a.is_zero():
            b = g.diff(pa)
            if not b.is_zero():
                out = out + a * b
        c = f.diff(pa)
        if not c.is_zero():
            d = g.diff(qa)
            if not d.is_zero():
                out = out - c * d
    return out


def canonical_pullback(coords: Sequence[Symbol], q_exprs: Sequence[Expr], p_exprs: Sequence[Expr]) -> list:
    """Matrix of the pullback of sum_A dq^A ^ dp_A along (q(x), p(x))."""
    dq = [[e.diff(c) for c in coords] for e in q_exprs]
    dp = [[e.diff(c) for c in coords] for e in p_exprs]
    k = len(coords)
    mat = [[ZERO] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            acc = ZERO
            for a in range(len(q_exprs)):
                x = dq[a][i] * dp[a][j] if not (dq[a][i].is_zero() or dp[a][j].is_zero()) else ZERO
                y = dq[a][j] * dp[a][i] if not (dq[a][j].is_zero() or dp[a][i].is_zero()) else ZERO
                acc = acc + x - y
            mat[i][j] = acc
            mat[j][i] = -acc
    return mat


def pullback_canonical_two_form(chart: Chart, n: int) -> TwoForm:
    q_exprs = chart.embedding(qs(n))
    p_exprs = chart.embedding(ps(n))
    return TwoForm(chart, canonical_pullback(chart.coords, q_exprs, p_exprs))


def differential(h: Expr, chart: Chart) -> OneForm:
    hr = chart.restrict(h)
    return OneForm(chart, [hr.diff(c) for c in chart.coords])


def kernel_basis(w: TwoForm) -> list[list[Expr]]:
    return linalg.nullspace(w.contraction_matrix(), w.chart.excluded, ncols=len(w.chart.coords))


def fresh_params(count: int, start: int = 1, stem: str = "f") -> list[Symbol]:
    return [free(start + i, stem) for i in range(count)]


def solve_linear_field(w: TwoForm, rhs: OneForm, start: int = 1, stem: str = "f"):
    """Solve i_X w = rhs on the chart; returns a solution or the obstructions."""
    sol = linalg.solve(w.contraction_matrix(), rhs.components, w.chart.excluded, ncols=len(w.chart.coords))
    if sol.conditions:
        return UnsolvableConditions(sol.conditions)
    params = fresh_params(len(sol.kernel), start, stem)
    return VectorFieldSolution(w.chart, sol.particular, sol.kernel, params)


def restricted_equation(matrix, rhs, base_coords: Sequence[Symbol], sub: Chart):
    """Rows of i_X w = rhs for X tangent to ``sub``, written in ``sub`` coordinates.

    ``matrix``/``rhs`` live on a chart with coordinates ``base_coords``; ``sub``
    is a deeper chart whose solved map covers the eliminated base coordinates.
    """
    emb = [sub.value_of(c) for c in base_coords]
    jac = [[e.diff(y) for y in sub.coords] for e in emb]
    k1, kf = len(base_coords), sub.dim
    w = [[sub.restrict(x) for x in row] for row in matrix]
    rows = []
    for c in range(k1):
        row = []
        for b in range(kf):
            acc = ZERO
            for a in range(k1):
                if w[a][c].is_zero() or jac[a][b].is_zero():
                    continue
                acc = acc + w[a][c] * jac[a][b]
            row.append(acc)
        rows.append(row)
    return rows, [sub.restrict(x) for x in rhs]


def exterior_derivative(components: Sequence[Expr], coords: Sequence[Symbol]) -> list:
    """Entries d(g)[A][B] = dg_B/dx^A - dg_A/dx^B."""
    k = len(coords)
    return [
        [components[b].diff(coords[a]) - components[a].diff(coords[b]) for b in range(k)]
        for a in range(k)
    ]


def contract(matrix, vec) -> list[Expr]:
    """(i_X w)_j = sum_i X^i w_ij."""
    k = len(vec)
    out = []
    for j in range(k):
        acc = ZERO
        for i in range(k):
            a = matrix[i][j]
            if a.is_zero() or vec[i].is_zero():
                continue
            acc = acc + vec[i] * a
        out.append(acc)
    return out


__all__ = [
    "Chart", "OneForm", "TwoForm", "UnsolvableConditions", "VectorFieldSolution", "canonical_pullback",
    "contract", "differential", "exterior_derivative", "fresh_params", "full_chart", "kernel_basis",
    "poisson_bracket", "pullback_canonical_two_form", "restricted_equation", "solve_linear_field", "ONE",
]
