"""Hamilton-Jacobi verification and polynomial ansatz search for a stabilized chain.

Three variants are supported.  ``gnh`` demands closedness on all of Q and the
full covector d(h1 o gamma) to vanish at points of Q_f, with X o gamma_f equal
to T gamma_f(X^gamma).  ``extended`` only keeps the components of that
covector tangent to Q_f and accepts relatedness up to ker w_f.  ``hinds``
additionally pulls the closedness condition back to Q_f.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Sequence

from .errors import ValidationError
from .geom import Chart, VectorFieldSolution, contract, exterior_derivative, pullback_canonical_two_form
from .gnh import ConstraintChain, extended_solutions, solve_dynamics
from .symcore import ZERO, Expr, Poly, Symbol, format_expr, ps, qs
from .symcore.symbols import coef

VARIANTS = ("gnh", "extended", "hinds")


@dataclass
class OneFormCandidate:
    components: list
    constants: tuple = ()
    label: str = ""

    def __post_init__(self):
        for c in self.components:
            bad = [s for s in c.symbols() if s.kind in ("p", "v", "u")]
            if bad:
                raise ValidationError(
                    f"one-form component {format_expr(c)} may only depend on positions and constants"
                )

    def bindings(self, n: int) -> dict:
        return dict(zip(ps(n), self.components))

    def to_json(self) -> list:
        return [format_expr(c) for c in self.components]


@dataclass
class Check:
    passed: bool
    residual: object  # Expr, list or matrix of Expr

    def to_json(self) -> dict:
        return {"pass": self.passed, "residual": _fmt(self.residual)}


def _fmt(x):
    if isinstance(x, Expr):
        return format_expr(x)
    if isinstance(x, dict):
        return {k: _fmt(v) for k, v in x.items()}
    return [_fmt(y) for y in x]


def _all_zero(x) -> bool:
    if isinstance(x, Expr):
        return x.is_zero()
    if isinstance(x, dict):
        return all(_all_zero(v) for v in x.values())
    return all(_all_zero(y) for y in x)


def _check(residual) -> Check:
    return Check(_all_zero(residual), residual)


@dataclass
class HJResidual:
    """d(h1 o gamma) at points of Q_f, split along and across Q_f."""

    full: list  # one entry per q, evaluated on Q_f
    tangential: list  # pullback to the Q_f chart
    transverse: dict  # solved q -> component

    def to_json(self) -> dict:
        return {
            "full": _fmt(self.full),
            "tangential": _fmt(self.tangential),
            "transverse": {k.display(): format_expr(v) for k, v in self.transverse.items()},
        }


@dataclass
class HJVerdict:
    variant: str
    closed: Check
    image_in_M1: Check
    image_in_Mf: Check
    hj_equation: Check
    related: Check
    closedness_convention: str
    residual: HJResidual
    projected: list

    @property
    def preconditions(self) -> bool:
        return self.closed.passed and self.image_in_M1.passed and self.image_in_Mf.passed

    @property
    def passed(self) -> bool:
        return self.preconditions and self.hj_equation.passed and self.related.passed

    @property
    def equivalence_holds(self) -> bool:
        return not self.preconditions or self.hj_equation.passed == self.related.passed

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "closedness": self.closedness_convention,
            "closed": self.closed.to_json(),
            "image_in_M1": self.image_in_M1.to_json(),
            "image_in_Mf": self.image_in_Mf.to_json(),
            "hj_equation": self.hj_equation.to_json(),
            "hj_residual": self.residual.to_json(),
            "related": self.related.to_json(),
            "projected_field": _fmt(self.projected),
            "pass": self.passed,
        }


def _qf_embedding(qf: Chart, n: int) -> list[Expr]:
    return qf.embedding(qs(n))


def _on_qf(e: Expr, qf: Chart) -> Expr:
    return qf.restrict(e)


def gamma_on_qf(gamma: OneFormCandidate, qf: Chart) -> list[Expr]:
    return [qf.restrict(c) for c in gamma.components]


def pullback_to_qf(components: Sequence[Expr], qf: Chart, n: int) -> list[Expr]:
    """Pull a q-space one-form back along the Q_f embedding."""
    emb = _qf_embedding(qf, n)
    comps = [qf.restrict(c) for c in components]
    out = []
    for y in qf.coords:
        acc = ZERO
        for c, e in zip(comps, emb):
            d = e.diff(y)
            if d.is_zero() or c.is_zero():
                continue
            acc = acc + c * d
        out.append(acc)
    return out


def closedness(gamma: OneFormCandidate, chain: ConstraintChain, variant: str):
    n = chain.n
    if variant == "hinds":
        pulled = pullback_to_qf(gamma.components, chain.q_f, n)
        return exterior_derivative(pulled, chain.q_f.coords), "along Q_f"
    return exterior_derivative(gamma.components, qs(n)), "global"


def image_residuals(gamma: OneFormCandidate, chain: ConstraintChain):
    G = gamma.bindings(chain.n)
    prim = [c.expr.subs(G) for c in chain.constraints if c.primary]
    sec = [chain.q_f.restrict(c.expr.subs(G)) for c in chain.constraints if not c.primary]
    return prim, sec


def h1_on_gamma(gamma: OneFormCandidate, chain: ConstraintChain) -> Expr:
    return chain.legendre.h1.subs(gamma.bindings(chain.n))


def hj_residual(gamma: OneFormCandidate, chain: ConstraintChain) -> HJResidual:
    n = chain.n
    qf = chain.q_f
    H = h1_on_gamma(gamma, chain)
    full = [qf.restrict(H.diff(x)) for x in qs(n)]
    tangential = [qf.restrict(H).diff(y) for y in qf.coords]
    solved = {s for s, _ in qf.solved}
    transverse = {x: c for x, c in zip(qs(n), full) if x in solved}
    return HJResidual(full, tangential, transverse)


def gamma_f_map(gamma: OneFormCandidate, chain: ConstraintChain) -> dict:
    """Values of all phase-space variables along gamma_f, in Q_f coordinates."""
    qf = chain.q_f
    n = chain.n
    out = {x: qf.value_of(x) for x in qs(n)}
    for pa, c in zip(ps(n), gamma.components):
        out[pa] = qf.restrict(c)
    return out


def field_along(X: VectorFieldSolution, chain: ConstraintChain, gamma: OneFormCandidate) -> list[Expr]:
    amb = X.ambient(qs(chain.n) + ps(chain.n))
    G = gamma_f_map(gamma, chain)
    return [a.subs(G) for a in amb]


def project_field(X: VectorFieldSolution, gamma: OneFormCandidate, chain: ConstraintChain) -> list[Expr]:
    """X^gamma in Q_f coordinates."""
    along = field_along(X, chain, gamma)
    qcomp = dict(zip(qs(chain.n), along[: chain.n]))
    return [qcomp[y] for y in chain.q_f.coords]


def push_forward(Y: Sequence[Expr], gamma: OneFormCandidate, chain: ConstraintChain) -> list[Expr]:
    """T gamma_f applied to a field on Q_f, as ambient phase-space components."""
    qf = chain.q_f
    G = gamma_f_map(gamma, chain)
    images = [G[x] for x in qs(chain.n) + ps(chain.n)]
    out = []
    for img in images:
        acc = ZERO
        for y, c in zip(qf.coords, Y):
            d = img.diff(y)
            if d.is_zero() or c.is_zero():
                continue
            acc = acc + c * d
        out.append(acc)
    return out


def variant_field(chain: ConstraintChain, variant: str) -> VectorFieldSolution:
    if variant == "extended":
        return extended_solutions(chain)
    return solve_dynamics(chain)


def related_residual(X: VectorFieldSolution, gamma: OneFormCandidate, chain: ConstraintChain, variant: str):
    Y = project_field(X, gamma, chain)
    R = [a - b for a, b in zip(push_forward(Y, gamma, chain), field_along(X, chain, gamma))]
    if variant == "gnh":
        return R, Y
    # residual must lie in ker w_f: contract w_f (along gamma_f) with its chart components
    mf = chain.m_f
    amb = qs(chain.n) + ps(chain.n)
    idx = {s: i for i, s in enumerate(amb)}
    chart_R = [R[idx[c]] for c in mf.coords]
    G = gamma_f_map(gamma, chain)
    wf = pullback_canonical_two_form(mf, chain.n).matrix
    wf = [[x.subs(G) for x in row] for row in wf]
    return contract(wf, chart_R), Y


def verify_candidate(
    gamma: OneFormCandidate,
    chain: ConstraintChain,
    variant: str = "gnh",
    X: VectorFieldSolution | None = None,
) -> HJVerdict:
    if variant not in VARIANTS:
        raise ValidationError(f"unknown variant {variant!r}")
    chain.require_stable()
    X = X or variant_field(chain, variant)
    dgamma, convention = closedness(gamma, chain, variant)
    prim, sec = image_residuals(gamma, chain)
    res = hj_residual(gamma, chain)
    hj = res.full if variant == "gnh" else res.tangential
    rel, Y = related_residual(X, gamma, chain, variant)
    return HJVerdict(
        variant=variant,
        closed=_check(dgamma),
        image_in_M1=_check(prim),
        image_in_Mf=_check(sec),
        hj_equation=_check(hj),
        related=_check(rel),
        closedness_convention=convention,
        residual=res,
        projected=Y,
    )


def extension_invariance(gamma: OneFormCandidate, chain: ConstraintChain, multipliers: dict, extension: Expr | None = None) -> Expr:
    """(H o gamma) - (h1 o gamma) for H = extension + sum u_a Phi^a with fixed multipliers."""
    G = gamma.bindings(chain.n)
    H = extension if extension is not None else chain.legendre.h_extension
    for j, phi in enumerate(chain.legendre.primary_constraints):
        m = multipliers.get(j + 1)
        if m is not None:
            H = H + m * phi
    return H.subs(G) - h1_on_gamma(gamma, chain)


# ansatz search

@dataclass
class AnsatzResult:
    status: str  # solved | empty | reduced
    candidates: list = field(default_factory=list)
    equations: list = field(default_factory=list)
    unknowns: list = field(default_factory=list)
    degree: int = 0

    def to_json(self) -> dict:
        out = {"degree": self.degree, "status": self.status, "candidates": [c.to_json() for c in self.candidates]}
        if self.unknowns:
            out["parameters"] = [s.display() for s in self.unknowns]
        if self.equations:
            out["equations"] = [format_expr(Expr(e)) for e in self.equations]
        return out


def ansatz_gamma(n: int, degree: int) -> tuple[list[Expr], list[Symbol]]:
    components, unknowns = [], []
    q = qs(n)
    counter = 0
    for a in range(1, n + 1):
        comp = ZERO
        for d in range(degree + 1):
            for combo in combinations_with_replacement(range(n), d):
                counter += 1
                tag = "".join(str(i + 1) for i in combo) or "0"
                s = coef(counter, f"a{a}_{tag}" if degree > 1 else f"a{a}{tag}")
                unknowns.append(s)
                mono = Expr.const(1)
                for i in combo:
                    mono = mono * Expr.sym(q[i])
                comp = comp + Expr.sym(s) * mono
        components.append(comp)
    return components, unknowns


def _equations(gamma: OneFormCandidate, chain: ConstraintChain, variant: str, unknowns) -> list[Poly]:
    dgamma, _ = closedness(gamma, chain, variant)
    prim, sec = image_residuals(gamma, chain)
    res = hj_residual(gamma, chain)
    hj = res.full if variant == "gnh" else res.tangential
    exprs = [x for row in dgamma for x in row] + prim + sec + hj
    unknown_set = set(unknowns)
    eqs = []
    for e in exprs:
        if e.is_zero():
            continue
        groups = e.num.coefficients_in([s for s in e.num.symbols() if s not in unknown_set])
        eqs.extend(g for g in groups.values() if not g.is_zero())
    return eqs


def _solve_polynomial_system(eqs: list[Poly], unknowns: list[Symbol]):
    """Eliminate linear equations and single-unknown monomials; returns (bindings, leftovers) or None."""
    bind: dict[Symbol, Expr] = {}
    eqs = list(eqs)
    while True:
        eqs = [e for e in eqs if not e.is_zero()]
        if any(e.is_constant() for e in eqs):
            return None
        step = None
        for e in eqs:
            if e.degree() != 1:
                continue
            for s in sorted(e.symbols(), reverse=True):
                parts = e.coefficients_in([s])
                a = parts.get(((s, 1),))
                if a is not None and a.is_constant() and len(parts) <= 2:
                    rest = parts.get((), Poly())
                    step = (s, Expr(-rest) / Expr(a))
                    break
            if step:
                break
        if step is None:
            for e in eqs:
                if len(e.terms) == 1:
                    (mono,) = e.terms
                    if len(mono) == 1:
                        step = (mono[0][0], ZERO)
                        break
        if step is None:
            return bind, eqs
        s, val = step
        bind = {k: v.subs({s: val}) for k, v in bind.items()}
        bind[s] = val
        eqs = [_subs_poly(e, s, val) for e in eqs]


def _subs_poly(e: Poly, s: Symbol, val: Expr) -> Poly:
    r = Expr(e).subs({s: val})
    return r.num


def ansatz_search(chain: ConstraintChain, degree: int = 1, variant: str = "gnh") -> AnsatzResult:
    chain.require_stable()
    comps, unknowns = ansatz_gamma(chain.n, degree)
    gamma = OneFormCandidate(comps)
    eqs = _equations(gamma, chain, variant, unknowns)
    got = _solve_polynomial_system(eqs, unknowns)
    if got is None:
        return AnsatzResult("empty", degree=degree)
    bind, left = got
    solved = OneFormCandidate([c.subs(bind) for c in comps], label=f"ansatz degree {degree}")
    params = sorted({s for c in solved.components for s in c.symbols() if s.kind == "coef"})
    if left:
        return AnsatzResult("reduced", [solved], left, params, degree)
    return AnsatzResult("solved", [solved], [], params, degree)
