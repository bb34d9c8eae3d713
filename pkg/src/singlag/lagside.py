"""Lagrangian-side picture on TQ: the presymplectic system (TQ, w_L, dE_L), its
constraint chain, second-order sections and complete lifts."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import linalg
from .errors import (
    AnalysisError,
    CorrespondenceMismatch,
    EmptyFinalManifold,
    MaxStepsExceeded,
    NotProjectable,
    NotRegular,
    UnsupportedSystem,
)
from .geom import (
    Chart,
    TwoForm,
    VectorFieldSolution,
    canonical_pullback,
    contract,
    exterior_derivative,
    fresh_params,
    restricted_equation,
)
from .gnh import Constraint, ConstraintChain, DEFAULT_MAX_STEPS, clean_constraint, run_gnh, solve_dynamics
from .hj import OneFormCandidate, gamma_f_map, project_field, verify_candidate
from .legendre import LagrangianSystem, LegendreData, energy, legendre_analysis, momenta
from .symcore import ZERO, Expr, Symbol, format_expr, ps, qs, total_diff, vs

TQ_PREFERENCE = ("v", "q")


def tq_coords(n: int) -> list[Symbol]:
    return qs(n) + vs(n)


def lagrangian_presymplectic(sys: LagrangianSystem):
    """(w_L, dE_L) on TQ with w_L = sum dq^A ^ dp^_A."""
    n = sys.n
    coords = tq_coords(n)
    chart = Chart(coords, (), sys.excluded)
    mat = canonical_pullback(coords, [Expr.sym(x) for x in qs(n)], momenta(sys))
    E = energy(sys)
    return TwoForm(chart, mat), [E.diff(c) for c in coords]


@dataclass
class TQLevel:
    index: int
    constraints: list
    chart: Chart

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "constraints": [c.to_json() for c in self.constraints],
            "chart": self.chart.to_json(),
        }


@dataclass
class TQChain:
    levels: list = field(default_factory=list)
    status: str = "running"
    reason: str = ""
    correspondence: list = field(default_factory=list)

    @property
    def final(self) -> TQLevel:
        return self.levels[-1]

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "levels": [lv.to_json() for lv in self.levels],
            "correspondence": self.correspondence,
        }


def _field_conditions(w: TwoForm, dE, chart: Chart):
    rows, rhs = restricted_equation(w.matrix, dE, w.chart.coords, chart)
    return linalg.solve(rows, rhs, chart.excluded, ncols=chart.dim)


def run_tq_chain(sys: LagrangianSystem, max_steps: int = DEFAULT_MAX_STEPS) -> TQChain:
    w, dE = lagrangian_presymplectic(sys)
    chain = TQChain([TQLevel(1, [], w.chart)])
    try:
        while True:
            lv = chain.final
            sol = _field_conditions(w, dE, lv.chart)
            chart, added = lv.chart, []
            for raw in sol.conditions:
                r = chart.restrict(raw)
                if r.is_zero():
                    continue
                cleaned = clean_constraint(r, chart.excluded)
                got = chart.absorb(cleaned, TQ_PREFERENCE)
                if got is None:
                    continue
                chart, solved = got
                added.append(Constraint(cleaned, lv.index + 1, solved))
            if not added:
                chain.status = "stabilized"
                return chain
            if lv.index >= max_steps:
                raise MaxStepsExceeded(f"no stabilization on TQ after {max_steps} levels")
            chain.levels.append(TQLevel(lv.index + 1, lv.constraints + added, chart))
    except EmptyFinalManifold as err:
        chain.status = "inconsistent"
        chain.reason = str(err)
        err.partial = chain
        raise
    except AnalysisError as err:
        chain.status = "unsupported"
        chain.reason = str(err)
        err.partial = chain
        raise


def pulled_back_chart(exprs: Sequence[Expr], sys: LagrangianSystem) -> Chart:
    chart = Chart(tq_coords(sys.n), (), sys.excluded)
    for e in exprs:
        r = chart.restrict(e)
        if r.is_zero():
            continue
        got = chart.absorb(clean_constraint(r, chart.excluded), TQ_PREFERENCE)
        if got is not None:
            chart = got[0]
    return chart


def check_correspondence(m_chain: ConstraintChain, tq: TQChain) -> list[dict]:
    """Level by level, M_l constraints composed with FL cut out exactly P_l."""
    leg = m_chain.legendre
    sys = m_chain.system
    if len(m_chain.levels) != len(tq.levels):
        raise CorrespondenceMismatch(
            min(len(m_chain.levels), len(tq.levels)) + 1,
            f"chain lengths differ ({len(m_chain.levels)} on T*Q, {len(tq.levels)} on TQ)",
        )
    out = []
    for ml, pl in zip(m_chain.levels, tq.levels):
        pulled = [leg.pull_to_tq(c.expr) for c in ml.constraints]
        bad = [format_expr(e) for e in pulled if not pl.chart.restrict(e).is_zero()]
        if bad:
            raise CorrespondenceMismatch(ml.index, f"pulled-back constraints {bad} do not vanish on P_{ml.index}")
        image = pulled_back_chart(pulled, sys)
        extra = [format_expr(c.expr) for c in pl.constraints if not image.restrict(c.expr).is_zero()]
        if extra:
            raise CorrespondenceMismatch(ml.index, f"constraints {extra} are not pulled back from M_{ml.index}")
        out.append(
            {
                "level": ml.index,
                "pulled_back": [format_expr(e) for e in pulled],
                "tq_constraints": [format_expr(c.expr) for c in pl.constraints],
                "agree": True,
            }
        )
    return out


def run_gnh_tq(sys: LagrangianSystem, m_chain: ConstraintChain | None = None, max_steps: int = DEFAULT_MAX_STEPS) -> TQChain:
    m_chain = m_chain or run_gnh(sys, max_steps=max_steps)
    tq = run_tq_chain(sys, max_steps)
    tq.correspondence = check_correspondence(m_chain, tq)
    return tq


def solve_tq_dynamics(sys: LagrangianSystem, tq: TQChain) -> VectorFieldSolution:
    w, dE = lagrangian_presymplectic(sys)
    chart = tq.final.chart
    sol = _field_conditions(w, dE, chart)
    if sol.conditions:
        raise UnsupportedSystem("Lagrangian dynamics not solvable on the final manifold")
    return VectorFieldSolution(chart, sol.particular, sol.kernel, fresh_params(len(sol.kernel), stem="k"))


def sode_residual(xi: VectorFieldSolution, n: int) -> list[Expr]:
    amb = xi.ambient(tq_coords(n))
    return [xi.chart.restrict(a - Expr.sym(va)) for a, va in zip(amb[:n], vs(n))]


def project_tq_field(xi: VectorFieldSolution, leg: LegendreData, target: Chart) -> list[Expr]:
    """FL_* xi as phase-space components over ``target``; raises NotProjectable."""
    n = leg.n
    amb = xi.ambient(tq_coords(n))
    out = list(amb[:n])
    for m in leg.momenta_exprs:
        acc = ZERO
        for c, comp in zip(tq_coords(n), amb):
            d = m.diff(c)
            if not (d.is_zero() or comp.is_zero()):
                acc = acc + comp * d
        out.append(xi.chart.restrict(acc))
    result = []
    for comp in out:
        r = target.restrict(comp.subs(leg.solved_velocities))
        if r.depends_on(vs(n)):
            raise NotProjectable(f"component {format_expr(r)} depends on the Legendre fibre")
        result.append(r)
    return result


@dataclass
class SodeSection:
    base: Chart
    velocities: list  # beta_v^A over M_f coordinates
    field: list  # X_xi along Im beta: q-components then v-components
    certificates: dict

    def to_json(self) -> dict:
        return {
            "base": [c.display() for c in self.base.coords],
            "velocities": [format_expr(x) for x in self.velocities],
            "field": [format_expr(x) for x in self.field],
            "certificates": {k: [format_expr(x) for x in v] for k, v in self.certificates.items()},
            "pass": all(x.is_zero() for v in self.certificates.values() for x in v),
        }


def field_derivative(X: VectorFieldSolution, e: Expr, free_partial=None) -> Expr:
    """X(e) on the chart of X, differentiating free functions formally."""
    acc = ZERO
    for c, comp in zip(X.chart.coords, X.general()):
        if comp.is_zero():
            continue
        d = total_diff(e, c, free_partial)
        if not d.is_zero():
            acc = acc + comp * d
    return X.chart.restrict(acc)


def beta_section(X: VectorFieldSolution, m_chain: ConstraintChain) -> SodeSection:
    """beta(p) = T tau_Q(xi(p)) for a projectable xi with projection X on M_f."""
    n = m_chain.n
    leg = m_chain.legendre
    mf = X.chart
    amb = X.ambient(qs(n) + ps(n))
    vel = amb[:n]
    vbind = dict(zip(vs(n), vel))
    fl = [mf.restrict(m.subs(vbind)) for m in leg.momenta_exprs]
    fl_res = [a - mf.value_of(pa) for a, pa in zip(fl, ps(n))]
    fl_res = [mf.restrict(x) for x in fl_res]
    vdot = [field_derivative(X, b) for b in vel]
    xi = vel + vdot
    w, dE = lagrangian_presymplectic(m_chain.system)
    at_beta = {**{x: mf.value_of(x) for x in qs(n)}, **vbind}
    wb = [[x.subs(at_beta) for x in row] for row in w.matrix]
    dEb = [x.subs(at_beta) for x in dE]
    eq = [mf.restrict(a - b) for a, b in zip(contract(wb, xi), dEb)]
    sode = [mf.restrict(a - b) for a, b in zip(xi[:n], vel)]
    # velocities over solved positions must be tangent to Q_f
    qf = m_chain.q_f
    tangent = []
    for s, val in qf.solved:
        rhs = ZERO
        for y in qf.coords:
            d = val.diff(y)
            if not d.is_zero():
                rhs = rhs + d * vel[y.index - 1]
        tangent.append(mf.restrict(vel[s.index - 1] - rhs))
    certs = {"legendre_identity": fl_res, "equations": eq, "sode": sode, "tangent_to_Qf": tangent}
    return SodeSection(mf, vel, xi, certs)


def complete_lift(
    Y: Sequence[Expr],
    coords: Sequence[Symbol],
    derivative: Callable[[Expr, Symbol], Expr] | None = None,
) -> list[Expr]:
    """Complete lift of Y = Y^A d/dx^A: components (Y^A, sum_B dY^A/dx^B v^B).

    Velocity symbols are those with the indices of ``coords``; ``derivative``
    replaces the plain partial derivative (e.g. to follow free functions).
    """
    der = derivative or (lambda e, x: total_diff(e, x))
    vel = [Expr.sym(_vel_of(c)) for c in coords]
    lifted = []
    for comp in Y:
        acc = ZERO
        for x, vx in zip(coords, vel):
            d = der(comp, x)
            if not d.is_zero():
                acc = acc + d * vx
        lifted.append(acc)
    return list(Y) + lifted


def _vel_of(c: Symbol) -> Symbol:
    return vs(c.index)[-1]


def corollary_check(X: VectorFieldSolution, gamma: OneFormCandidate, m_chain: ConstraintChain) -> dict:
    """X_xi(beta(gamma_f(q))) against (X^gamma)^C(X^gamma(q)) on Q_f directions."""
    n = m_chain.n
    qf = m_chain.q_f
    sec = beta_section(X, m_chain)
    G = gamma_f_map(gamma, m_chain)
    lhs_all = [x.subs(G) for x in sec.field]
    idx = [c.index - 1 for c in qf.coords]
    lhs = [lhs_all[i] for i in idx] + [lhs_all[n + i] for i in idx]

    Y = project_field(X, gamma, m_chain)
    mf_coords = X.chart.coords

    def chain_rule(e: Expr, y: Symbol) -> Expr:
        # d(e o gamma_f)/dy with free functions of M_f coordinates
        out = e.diff(y)
        for f in sorted(s for s in e.symbols() if s.kind == "free"):
            de = e.diff(f)
            acc = ZERO
            for c in mf_coords:
                dc = G.get(c, Expr.sym(c)).diff(y)
                if not dc.is_zero():
                    acc = acc + Expr.sym(f.partial(c)) * dc
            if not acc.is_zero():
                out = out + de * acc
        return out

    lift = complete_lift(Y, qf.coords, chain_rule)
    k = len(qf.coords)
    vb = {_vel_of(c): y for c, y in zip(qf.coords, Y)}
    rhs = lift[:k] + [x.subs(vb) for x in lift[k:]]
    residual = [qf.restrict(a - b) for a, b in zip(lhs, rhs)]
    return {
        "lhs": [format_expr(x) for x in lhs],
        "rhs": [format_expr(x) for x in rhs],
        "residual": [format_expr(x) for x in residual],
        "pass": all(x.is_zero() for x in residual),
    }


@dataclass
class RegularVerdict:
    closed: bool
    closed_residual: list
    hj: bool
    hj_residual: list
    related: bool
    related_residual: list

    @property
    def equivalent(self) -> bool:
        return not self.closed or self.hj == self.related

    def to_json(self) -> dict:
        f = lambda xs: [format_expr(x) for x in xs]
        return {
            "closed": {"pass": self.closed, "residual": [f(r) for r in self.closed_residual]},
            "hj_equation": {"pass": self.hj, "residual": f(self.hj_residual)},
            "related": {"pass": self.related, "residual": f(self.related_residual)},
        }


def verify_regular_lagrangian_hj(Z: Sequence[Expr], sys: LagrangianSystem) -> RegularVerdict:
    """For regular L: FL o Z closed, d(E_L o Z) = 0 and relatedness of the lifted dynamics."""
    n = sys.n
    leg = legendre_analysis(sys)
    if leg.rank != n:
        raise NotRegular(f"Hessian has rank {leg.rank} < {n}")
    zb = dict(zip(vs(n), Z))
    gamma = [m.subs(zb) for m in leg.momenta_exprs]
    dg = exterior_derivative(gamma, qs(n))
    EZ = energy(sys).subs(zb)
    dEZ = [EZ.diff(x) for x in qs(n)]
    chain = run_gnh(sys, leg)
    verdict = verify_candidate(OneFormCandidate(gamma), chain, "gnh")
    return RegularVerdict(
        closed=all(x.is_zero() for row in dg for x in row),
        closed_residual=dg,
        hj=all(x.is_zero() for x in dEZ),
        hj_residual=dEZ,
        related=verdict.related.passed,
        related_residual=verdict.related.residual,
    )
