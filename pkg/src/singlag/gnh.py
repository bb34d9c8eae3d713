"""The constraint algorithm on the primary constraint manifold.

``run_gnh`` follows the Dirac-Bergmann form of the tangency condition: each
constraint must be preserved by ``h + u_j Phi^j``; rows of the multiplier
system that cannot be satisfied become new constraints.  ``run_hinds`` instead
re-restricts the two-form and Hamiltonian to every level and solves
``i_X w_l = dh_l`` directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .errors import (
    AnalysisError,
    EmptyFinalManifold,
    MaxStepsExceeded,
    NonlinearMultiplier,
    NonSolvableConstraint,
    UnsupportedSystem,
)
from .factor import clean_numerator, monic
from .geom import (
    Chart,
    TwoForm,
    UnsolvableConditions,
    VectorFieldSolution,
    differential,
    fresh_params,
    kernel_basis,
    poisson_bracket,
    pullback_canonical_two_form,
    restricted_equation,
    solve_linear_field,
)
from .legendre import LagrangianSystem, LegendreData, legendre_analysis
from .symcore import ZERO, Expr, Symbol, format_expr, ps, qs, u

TQ_STAR_PREFERENCE = ("p", "q")
DEFAULT_MAX_STEPS = 16


@dataclass
class Constraint:
    expr: Expr
    level: int  # level whose manifold it first cuts out (1 = primary)
    solved_for: Symbol | None

    @property
    def primary(self) -> bool:
        return self.level == 1

    def to_json(self) -> dict:
        return {
            "expr": format_expr(self.expr),
            "level": self.level,
            "kind": "primary" if self.primary else "secondary",
            "solved_for": self.solved_for.display() if self.solved_for else None,
        }


@dataclass
class ConstraintLevel:
    index: int
    constraints: list
    chart: Chart
    two_form: TwoForm
    h_restricted: Expr
    multipliers: dict = field(default_factory=dict)  # u_j -> Expr (free u's stay symbolic)
    identities: int = 0

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "constraints": [c.to_json() for c in self.constraints],
            "chart": self.chart.to_json(),
            "h": format_expr(self.h_restricted),
            "multipliers": {
                k.display(): ("free" if v is None else format_expr(v)) for k, v in self.multipliers.items()
            },
        }


@dataclass
class ConstraintChain:
    algorithm: str
    system: LagrangianSystem
    legendre: LegendreData
    levels: list = field(default_factory=list)
    status: str = "running"  # stabilized | inconsistent | unsupported
    reason: str = ""
    residual: Expr | None = None
    q_charts: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.system.n

    @property
    def final(self) -> ConstraintLevel:
        return self.levels[-1]

    @property
    def final_index(self) -> int:
        return self.levels[-1].index

    @property
    def constraints(self) -> list:
        return self.final.constraints

    @property
    def m_f(self) -> Chart:
        return self.final.chart

    @property
    def q_f(self) -> Chart:
        return self.q_charts[-1]

    def require_stable(self) -> None:
        if self.status != "stabilized":
            raise UnsupportedSystem(f"chain is not stabilized ({self.status})")

    def constraint_exprs(self) -> list[Expr]:
        return [c.expr for c in self.constraints]

    def to_json(self) -> dict:
        out = {
            "algorithm": self.algorithm,
            "status": self.status,
            "levels": [lv.to_json() for lv in self.levels],
            "q_charts": [c.to_json() for c in self.q_charts],
        }
        if self.status == "stabilized":
            out["final_level"] = self.final_index
        if self.reason:
            out["reason"] = self.reason
        if self.residual is not None:
            out["residual"] = format_expr(self.residual)
        return out


@dataclass
class TangencyResult:
    new_constraints: list
    determinations: dict
    identities: int
    residuals: list  # (constraint, tangency expression with u symbolic)


def clean_constraint(e: Expr, excluded) -> Expr:
    """Reduce a vanishing condition to a single monic irreducible polynomial.

    Raises ``EmptyFinalManifold`` when the condition cannot vanish anywhere on
    the domain and ``NonSolvableConstraint`` when its zero set is a union of
    several components.
    """
    factors = clean_numerator(e.num, excluded)
    if not factors:
        err = EmptyFinalManifold(f"condition {format_expr(e)} = 0 has no solutions on the domain")
        err.residual = e
        raise err
    if len(factors) > 1:
        raise NonSolvableConstraint(
            f"condition {format_expr(e)} = 0 splits into {len(factors)} components"
        )
    return Expr(monic(factors[0]))


def q_projection(chart: Chart, n: int) -> Chart:
    """Chart of the projection to configuration space: solved q's must be q-only."""
    solved = []
    for s, val in chart.solved:
        if s.kind != "q":
            continue
        if any(x.kind in ("p", "v", "u") for x in val.symbols()):
            raise UnsupportedSystem(
                f"projection to configuration space is not a solved submanifold ({s.display()} = {format_expr(val)})"
            )
        solved.append((s, val))
    solved_syms = {s for s, _ in solved}
    return Chart([x for x in qs(n) if x not in solved_syms], solved, chart.excluded)


def _multiplier_symbols(leg: LegendreData) -> list[Symbol]:
    return [u(j + 1) for j in range(len(leg.primary_constraints))]


def tangency_step(level: ConstraintLevel, all_constraints, h: Expr, primaries, n: int) -> TangencyResult:
    """Preservation of every constraint by h + u_j Phi^j, restricted to the level."""
    chart = level.chart
    us = [u(j + 1) for j in range(len(primaries))]
    rows, rhs, residuals = [], [], []
    for c in all_constraints:
        b = chart.restrict(poisson_bracket(c.expr, h, n))
        row = [chart.restrict(poisson_bracket(c.expr, phi, n)) for phi in primaries]
        for x in row + [b]:
            if x.depends_on(us):
                raise NonlinearMultiplier("multiplier appears nonlinearly in a tangency condition")
        rows.append(row)
        rhs.append(-b)
        full = b
        for uj, a in zip(us, row):
            if not a.is_zero():
                full = full + Expr.sym(uj) * a
        residuals.append((c, full))
    identities = sum(1 for _, r in residuals if r.is_zero())
    if not us:
        conds = [-r for r in rhs if not r.is_zero()]
        return TangencyResult(conds, {}, identities, residuals)
    el = linalg.eliminate(rows, [[b] for b in rhs], chart.excluded, ncols=len(us))
    conds = [-c for c in el.conditions(0)]
    free_vals = {c: Expr.sym(us[c]) for c in el.free_cols}
    sol = el.back_substitute(free_vals, 0)
    free_cols = set(el.free_cols)
    det = {us[c]: (None if c in free_cols else sol[c]) for c in range(len(us))}
    return TangencyResult(conds, det, identities, residuals)


def _start(sys: LagrangianSystem, leg: LegendreData, algorithm: str) -> ConstraintChain:
    chain = ConstraintChain(algorithm, sys, leg)
    chart = leg.m1_chart
    cons = [Constraint(e, 1, s) for e, s in zip(leg.primary_constraints, leg.primary_solved_for)]
    w1 = pullback_canonical_two_form(chart, sys.n)
    chain.levels.append(ConstraintLevel(1, cons, chart, w1, leg.h1))
    chain.q_charts.append(q_projection(chart, sys.n))
    return chain


def _absorb_all(chain: ConstraintChain, conditions, level_index: int) -> list[Constraint] | None:
    """Absorb raw conditions into a copy of the current chart; None if all were identities."""
    chart = chain.final.chart
    added = []
    for raw in conditions:
        r = chart.restrict(raw)
        if r.is_zero():
            continue
        try:
            cleaned = clean_constraint(r, chart.excluded)
        except EmptyFinalManifold as err:
            chain.status = "inconsistent"
            chain.residual = r
            chain.reason = str(err)
            err.partial = chain
            raise
        got = chart.absorb(cleaned, TQ_STAR_PREFERENCE)
        if got is None:
            continue
        chart, solved = got
        added.append(Constraint(cleaned, level_index, solved))
    if not added:
        return None
    return added, chart


def _guard(chain: ConstraintChain, fn):
    try:
        return fn()
    except EmptyFinalManifold:
        raise
    except AnalysisError as err:
        if chain.status == "running":
            chain.status = "unsupported"
            chain.reason = str(err)
        err.partial = chain
        raise


def run_gnh(sys: LagrangianSystem, leg: LegendreData | None = None, max_steps: int = DEFAULT_MAX_STEPS) -> ConstraintChain:
    leg = leg or legendre_analysis(sys)
    chain = _start(sys, leg, "gnh")
    primaries = leg.primary_constraints
    h = leg.h_extension

    def body():
        while True:
            level = chain.final
            step = tangency_step(level, level.constraints, h, primaries, sys.n)
            level.multipliers = step.determinations
            level.identities = step.identities
            got = _absorb_all(chain, step.new_constraints, level.index + 1)
            if got is None:
                chain.status = "stabilized"
                return chain
            if level.index >= max_steps:
                raise MaxStepsExceeded(f"no stabilization after {max_steps} levels")
            _append_level(chain, got, sys, lambda ch: level.two_form)

    return _guard(chain, body)


def _append_level(chain, got, sys, form_for) -> None:
    added, chart = got
    prev = chain.final
    cons = [Constraint(c.expr, c.level, c.solved_for) for c in prev.constraints] + added
    lv = ConstraintLevel(prev.index + 1, cons, chart, None, chart.restrict(chain.legendre.h1))
    lv.two_form = form_for(chart)
    chain.levels.append(lv)
    chain.q_charts.append(q_projection(chart, sys.n))


def run_hinds(sys: LagrangianSystem, leg: LegendreData | None = None, max_steps: int = DEFAULT_MAX_STEPS) -> ConstraintChain:
    leg = leg or legendre_analysis(sys)
    chain = _start(sys, leg, "hinds")

    def body():
        while True:
            level = chain.final
            res = solve_linear_field(level.two_form, differential(level.h_restricted, level.chart))
            conds = res.conditions if isinstance(res, UnsolvableConditions) else []
            got = _absorb_all(chain, conds, level.index + 1)
            if got is None:
                chain.status = "stabilized"
                return chain
            if level.index >= max_steps:
                raise MaxStepsExceeded(f"no stabilization after {max_steps} levels")
            _append_level(chain, got, sys, lambda ch: pullback_canonical_two_form(ch, sys.n))

    return _guard(chain, body)


@dataclass
class Classification:
    labels: list  # (Constraint, "primary"/"secondary", "first"/"second")
    brackets: list  # restricted bracket matrix

    def to_json(self) -> list:
        return [
            {"constraint": format_expr(c.expr), "origin": o, "class": k} for c, o, k in self.labels
        ]


def classify(chain: ConstraintChain) -> Classification:
    chain.require_stable()
    cons = chain.constraints
    chart = chain.m_f
    mat = [[chart.restrict(poisson_bracket(a.expr, b.expr, chain.n)) for b in cons] for a in cons]
    labels = []
    for c, row in zip(cons, mat):
        first = all(x.is_zero() for x in row)
        labels.append((c, "primary" if c.primary else "secondary", "first" if first else "second"))
    return Classification(labels, mat)


def _dynamics_system(chain: ConstraintChain):
    """Matrix and right-hand side of i_X w1 = dh1 for X tangent to M_f, in M_f coordinates."""
    lv1 = chain.levels[0]
    dh1 = [lv1.h_restricted.diff(c) for c in lv1.chart.coords]
    return restricted_equation(lv1.two_form.matrix, dh1, lv1.chart.coords, chain.m_f)


def solve_dynamics(chain: ConstraintChain) -> VectorFieldSolution:
    chain.require_stable()
    mf = chain.m_f
    if chain.algorithm == "hinds":
        w = chain.final.two_form
        res = solve_linear_field(w, differential(chain.final.h_restricted, mf))
        if isinstance(res, UnsolvableConditions):
            raise UnsupportedSystem("dynamics not solvable on the final manifold")
        return res
    rows, rhs = _dynamics_system(chain)
    sol = linalg.solve(rows, rhs, mf.excluded, ncols=mf.dim)
    if sol.conditions:
        raise UnsupportedSystem(
            "dynamics not solvable on the final manifold: "
            + ", ".join(format_expr(c) for c in sol.conditions)
        )
    return VectorFieldSolution(mf, sol.particular, sol.kernel, fresh_params(len(sol.kernel)))


def final_two_form(chain: ConstraintChain) -> TwoForm:
    return pullback_canonical_two_form(chain.m_f, chain.n)


def extended_solutions(chain: ConstraintChain, base: VectorFieldSolution | None = None) -> VectorFieldSolution:
    """Particular dynamics plus all of ker w_f, each direction with its own parameter."""
    base = base or solve_dynamics(chain)
    ker = kernel_basis(final_two_form(chain))
    return VectorFieldSolution(chain.m_f, base.particular, ker, fresh_params(len(ker), stem="g"))


# certificates

def ambient_field(chain: ConstraintChain, X: VectorFieldSolution) -> list[Expr]:
    return X.ambient(qs(chain.n) + ps(chain.n))


def apply_field(chain: ConstraintChain, X: VectorFieldSolution, f: Expr) -> Expr:
    amb = ambient_field(chain, X)
    acc = ZERO
    for s, comp in zip(qs(chain.n) + ps(chain.n), amb):
        d = f.diff(s)
        if d.is_zero() or comp.is_zero():
            continue
        acc = acc + comp * d
    return chain.m_f.restrict(acc)


def tangency_certificate(chain: ConstraintChain, X: VectorFieldSolution) -> list[Expr]:
    return [apply_field(chain, X, c.expr) for c in chain.constraints]


def solution_certificate(chain: ConstraintChain, X: VectorFieldSolution) -> list[Expr]:
    if chain.algorithm == "hinds":
        w = chain.final.two_form
        rhs = differential(chain.final.h_restricted, chain.m_f).components
        rows = w.contraction_matrix()
    else:
        rows, rhs = _dynamics_system(chain)
    lhs = linalg.matvec(rows, X.general())
    return [chain.m_f.restrict(a - b) for a, b in zip(lhs, rhs)]


def multiplier_certificate(chain: ConstraintChain) -> list[Expr]:
    """Tangency expressions with the final determinations substituted."""
    lv = chain.final
    prim = chain.legendre.primary_constraints
    step = tangency_step(lv, lv.constraints, chain.legendre.h_extension, prim, chain.n)
    bind = {k: v for k, v in step.determinations.items() if v is not None}
    return [lv.chart.restrict(r.subs(bind)) for _, r in step.residuals]


def idempotence_check(chain: ConstraintChain) -> list[Expr]:
    """New constraints produced by one more step past stabilization."""
    lv = chain.final
    if chain.algorithm == "hinds":
        res = solve_linear_field(lv.two_form, differential(lv.h_restricted, lv.chart))
        conds = res.conditions if isinstance(res, UnsolvableConditions) else []
    else:
        step = tangency_step(lv, lv.constraints, chain.legendre.h_extension, chain.legendre.primary_constraints, chain.n)
        conds = step.new_constraints
    return [c for c in (lv.chart.restrict(x) for x in conds) if not c.is_zero()]


def same_manifold(a: Chart, b: Chart, constraints_a, constraints_b) -> bool:
    return all(b.restrict(c.expr).is_zero() for c in constraints_a) and all(
        a.restrict(c.expr).is_zero() for c in constraints_b
    )


def compare_chains(gnh: ConstraintChain, hinds: ConstraintChain) -> list[dict]:
    out = []
    for i in range(max(len(gnh.levels), len(hinds.levels))):
        if i >= len(gnh.levels) or i >= len(hinds.levels):
            out.append({"level": i + 1, "agree": False})
            continue
        a, b = gnh.levels[i], hinds.levels[i]
        out.append({"level": i + 1, "agree": same_manifold(a.chart, b.chart, a.constraints, b.constraints)})
    return out
