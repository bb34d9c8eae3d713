import pytest
import sympy
from hypothesis import given, settings, strategies as st

from singlag import linalg
from singlag.errors import NonSolvableConstraint, RankNotConstant
from singlag.geom import (
    Chart,
    OneForm,
    TwoForm,
    UnsolvableConditions,
    full_chart,
    kernel_basis,
    poisson_bracket,
    pullback_canonical_two_form,
    solve_linear_field,
)
from singlag.symcore import Expr, parse_expr, p, q, symbol_table

from conftest import small_poly, to_sympy

T = symbol_table(2)
P = lambda s: parse_expr(s, T)
PHASE = ["q1", "q2", "p1", "p2"]


def _matrix(rows):
    return [[P(x) for x in r] for r in rows]


def _sympy_matrix(m):
    return sympy.Matrix([[to_sympy(x) for x in r] for r in m])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=4))
def test_rank_and_nullspace_match_sympy_on_rational_matrices(rows):
    m = [[Expr.const(x) for x in r] for r in rows]
    sm = sympy.Matrix(rows)
    assert linalg.rank(m, ncols=4) == sm.rank()
    ker = linalg.nullspace(m, ncols=4)
    assert len(ker) == 4 - sm.rank()
    for vec in ker:
        assert all(x.is_zero() for x in linalg.matvec(m, vec))


def test_symbolic_nullspace_with_excluded_pivot():
    m = _matrix([["q1", "q2"], ["q1*q2", "q2^2"]])
    with pytest.raises(RankNotConstant):
        linalg.nullspace(m, ncols=2)
    ker = linalg.nullspace(m, excluded=[P("q1").num], ncols=2)
    assert len(ker) == 1
    assert all(x.is_zero() for x in linalg.matvec(m, ker[0]))
    sm = _sympy_matrix(m)
    assert sm.rank() == 1


def test_solve_reports_conditions():
    m = _matrix([["1", "0"], ["0", "0"]])
    sol = linalg.solve(m, [P("q1"), P("q2^2")], ncols=2)
    assert [str(c) for c in sol.conditions] == ["q2^2"]
    sol = linalg.solve(m, [P("q1"), P("0")], ncols=2)
    assert sol.conditions == [] and sol.particular[0] == P("q1")


def test_chart_absorb_prefers_momenta_then_lowest_index():
    c = full_chart(2)
    c2, s = c.absorb(P("p1 - q2 - q1"), ("p", "q"))
    assert s == p(1) and c2.value_of(p(1)) == P("q1 + q2")
    with pytest.raises(NonSolvableConstraint):
        c2.absorb(P("q1^2*q2 + q1"), ("p", "q"))
    c3, s = full_chart(2, [P("q1").num]).absorb(P("q1^2*q2 + q1"), ("p", "q"))
    assert s == q(2) and c3.value_of(q(2)) == P("-1/q1")
    assert c2.absorb(P("p1 - q1 - q2"), ("p", "q")) is None
    with pytest.raises(NonSolvableConstraint):
        c.absorb(P("q1^2 + p1^2"), ("p", "q"))


PB = lambda f, g: poisson_bracket(f, g, 2)


@settings(max_examples=120, deadline=None)
@given(small_poly(PHASE), small_poly(PHASE), small_poly(PHASE))
def test_bracket_axioms(a, b, c):
    f, g, h = P(a), P(b), P(c)
    assert (PB(f, g) + PB(g, f)).is_zero()
    assert (PB(f, g * h) - (PB(f, g) * h + g * PB(f, h))).is_zero()
    jac = PB(f, PB(g, h)) + PB(g, PB(h, f)) + PB(h, PB(f, g))
    assert jac.is_zero()


@settings(max_examples=30, deadline=None)
@given(small_poly(PHASE), small_poly(PHASE))
def test_bracket_matches_sympy_definition(a, b):
    q1, q2, p1, p2 = sympy.symbols(PHASE)
    sa, sb = [sympy.sympify(x) for x in (a, b)]
    want = sum(sympy.diff(sa, qq) * sympy.diff(sb, pp) - sympy.diff(sa, pp) * sympy.diff(sb, qq) for qq, pp in ((q1, p1), (q2, p2)))
    assert sympy.expand(to_sympy(PB(P(a), P(b))) - want) == 0


def test_canonical_brackets():
    assert PB(P("q1"), P("p1")) == Expr.const(1)
    assert PB(P("p2"), P("1/2*p1^2 - q2*q1^2")).is_zero() is False
    assert PB(P("p2"), P("1/2*p1^2 - q2*q1^2")) == P("q1^2")


def test_pullback_two_form_and_kernel():
    # p2 = q1: pulled-back form dq1^dp1 + dq2^dq1 on (q1, q2, p1)
    chart = Chart([q(1), q(2), p(1)], [(p(2), P("q1"))])
    w = pullback_canonical_two_form(chart, 2)
    assert w.is_antisymmetric()
    terms = {(a.name, b.name): str(c) for a, b, c in w.terms()}
    assert terms == {("q1", "q2"): "-1", ("q1", "p1"): "1"}
    ker = kernel_basis(w)
    assert [[str(x) for x in k] for k in ker] == [["0", "1", "1"]]
    # independent oracle
    sm = _sympy_matrix(w.matrix).T
    assert all(x == 0 for x in sm * sympy.Matrix([0, 1, 1]))


def test_solve_linear_field_parametrizes_kernel():
    chart = Chart([q(1), q(2), p(1)], [(p(2), P("q1"))])
    w = pullback_canonical_two_form(chart, 2)
    h = P("1/2*(p1 - q2)^2")
    sol = solve_linear_field(w, OneForm(chart, [h.diff(c) for c in chart.coords]))
    assert not isinstance(sol, UnsolvableConditions)
    assert [str(x) for x in sol.general()] == ["p1 - q2", "f1", "f1"]


def test_solve_linear_field_obstructions():
    chart = full_chart(1)
    w = TwoForm(chart, [[Expr(0), Expr(0)], [Expr(0), Expr(0)]])
    res = solve_linear_field(w, OneForm(chart, [Expr(0), Expr.const(1)]))
    assert isinstance(res, UnsolvableConditions) and res.conditions == [Expr.const(1)]
