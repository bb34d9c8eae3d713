"""Legendre transform of a velocity-quadratic Lagrangian: momenta, Hessian,
primary constraints, the primary constraint chart and the projected energy."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .errors import NotAlmostRegular, RankNotConstant, ValidationError
from .geom import Chart
from .symcore import ZERO, Expr, Poly, Symbol, p, ps, q, qs, v, vs
from .symcore.symbols import KIND_RANK


@dataclass
class LagrangianSystem:
    n: int
    L: Expr
    excluded: tuple = ()
    constants: tuple = ()

    def __post_init__(self):
        self.excluded = tuple(self.excluded)
        self.constants = tuple(self.constants)
        bad = {s for s in self.L.symbols() if s.kind in ("p", "u", "free", "coef")}
        if bad:
            raise ValidationError(f"Lagrangian may not contain {sorted(s.name for s in bad)}")
        for s in self.L.symbols():
            if s.kind in ("q", "v") and not 1 <= s.index <= self.n:
                raise ValidationError(f"symbol {s.name} out of range for dimension {self.n}")
        check_velocity_class(self.L, self.n)


def check_velocity_class(L: Expr, n: int) -> None:
    """At most quadratic in velocities, with velocity-free denominator."""
    vel = vs(n)
    if L.den.degree_in(vel) > 0:
        raise NotAlmostRegular("velocities may not appear in a denominator")
    if L.num.degree_in(vel) > 2:
        raise NotAlmostRegular("Lagrangian must be at most quadratic in the velocities")


@dataclass
class LegendreData:
    n: int
    momenta_exprs: list
    hessian: list
    rank: int
    solved_velocities: dict
    primary_constraints: list
    primary_solved_for: list
    m1_chart: Chart
    energy: Expr
    h1: Expr
    h_extension: Expr
    pivot_velocities: list = field(default_factory=list)

    @property
    def fl_map(self) -> dict:
        """p_A -> momentum expression in (q, v)."""
        return {pa: e for pa, e in zip(ps(self.n), self.momenta_exprs)}

    def pull_to_tq(self, e: Expr) -> Expr:
        """Compose a phase-space function with the Legendre map."""
        return e.subs(self.fl_map)


def momenta(sys: LagrangianSystem) -> list[Expr]:
    return [sys.L.diff(va) for va in vs(sys.n)]


def hessian(sys: LagrangianSystem) -> tuple[list, int]:
    mom = momenta(sys)
    W = [[m.diff(vb) for vb in vs(sys.n)] for m in mom]
    return W, linalg.rank(W, sys.excluded)


def energy(sys: LagrangianSystem) -> Expr:
    out = -sys.L
    for va, m in zip(vs(sys.n), momenta(sys)):
        out = out + Expr.sym(va) * m
    return out


def normalize_constraint(e: Expr) -> Expr:
    """Scale so the leading numerator coefficient is 1."""
    if e.is_zero():
        return e
    lc = e.num.leading_coefficient()
    return e if lc == 1 else e / Expr.const(lc)


def legendre_analysis(sys: LagrangianSystem, extension: Expr | None = None) -> LegendreData:
    n = sys.n
    vel = vs(n)
    mom = momenta(sys)
    W = [[m.diff(vb) for vb in vel] for m in mom]
    zero_v = {vb: ZERO for vb in vel}
    base = [m.subs(zero_v) for m in mom]
    for m, row, b in zip(mom, W, base):
        rebuilt = b
        for vb, w in zip(vel, row):
            if w.depends_on(vel):
                raise NotAlmostRegular("Hessian depends on the velocities")
            rebuilt = rebuilt + w * Expr.sym(vb)
        if rebuilt != m:
            raise NotAlmostRegular("momenta are not affine in the velocities")

    rows = [list(r) for r in W]
    rhs = [Expr.sym(pa) - b for pa, b in zip(ps(n), base)]
    pivot_of_row: dict[int, int] = {}
    for a in range(n):
        col = None
        pending = False
        for c in range(n):
            if c in pivot_of_row.values():
                continue
            x = rows[a][c]
            if x.is_zero():
                continue
            if linalg.is_admissible(x, sys.excluded):
                col = c
                break
            pending = True
        if col is None:
            if pending:
                raise RankNotConstant("Hessian pivot could vanish on the domain")
            continue
        piv = rows[a][col]
        rows[a] = [x / piv for x in rows[a]]
        rhs[a] = rhs[a] / piv
        for r in range(n):
            if r == a:
                continue
            f = rows[r][col]
            if f.is_zero():
                continue
            rows[r] = [x - f * y for x, y in zip(rows[r], rows[a])]
            rhs[r] = rhs[r] - f * rhs[a]
        pivot_of_row[a] = col

    rank = len(pivot_of_row)
    pivot_cols = set(pivot_of_row.values())
    solved_velocities: dict[Symbol, Expr] = {}
    for a, c in sorted(pivot_of_row.items(), key=lambda t: t[1]):
        val = rhs[a]
        for j in range(n):
            if j not in pivot_cols and not rows[a][j].is_zero():
                val = val - rows[a][j] * Expr.sym(vel[j])
        solved_velocities[vel[c]] = val

    constraints, solved_for, solved_momenta = [], [], []
    for a in range(n):
        if a in pivot_of_row:
            continue
        raw = rhs[a]
        if raw.depends_on(vel):
            raise NotAlmostRegular("primary constraint depends on the velocities")
        pa = p(a + 1)
        solved_momenta.append((pa, Expr.sym(pa) - raw))
        constraints.append(normalize_constraint(raw))
        solved_for.append(pa)

    coords = qs(n) + [p(a + 1) for a in sorted(pivot_of_row)]
    chart = Chart(coords, solved_momenta, sys.excluded)

    E = energy(sys)
    h1 = E.subs(solved_velocities)
    if h1.depends_on(vel):
        raise NotAlmostRegular("energy does not project to the primary constraint manifold")
    h1 = chart.restrict(h1)
    if extension is not None:
        if any(s.kind in ("v", "u") for s in extension.symbols()):
            raise ValidationError("Hamiltonian extension must be a function of (q, p)")
        if chart.restrict(extension) != h1:
            raise ValidationError("extension does not restrict to h1 on the primary constraint manifold")
        h_ext = extension
    else:
        h_ext = h1
    return LegendreData(
        n=n,
        momenta_exprs=mom,
        hessian=W,
        rank=rank,
        solved_velocities=solved_velocities,
        primary_constraints=constraints,
        primary_solved_for=solved_for,
        m1_chart=chart,
        energy=E,
        h1=h1,
        h_extension=h_ext,
        pivot_velocities=[vel[c] for c in sorted(pivot_cols)],
    )
