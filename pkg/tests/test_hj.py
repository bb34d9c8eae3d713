import pytest
from hypothesis import given, settings, strategies as st

from singlag.errors import ValidationError
from singlag.gnh import solve_dynamics
from singlag.hj import (
    OneFormCandidate,
    ansatz_search,
    extension_invariance,
    hj_residual,
    project_field,
    verify_candidate,
)
from singlag.symcore import format_expr

from conftest import PAPER_FIXTURES, load

CONDITIONS = ("closed", "image_in_M1", "image_in_Mf", "hj_equation", "related")


def cand(fx, *texts):
    return OneFormCandidate([fx.P(t) for t in texts], fx.spec.constants)


def chain_for(fx, variant):
    return fx.hinds if variant == "hinds" else fx.chain


def flags(v):
    return {k: getattr(v, k).passed for k in CONDITIONS}


def test_components_must_be_configuration_functions():
    fx = load("sundermeyer")
    with pytest.raises(ValidationError):
        OneFormCandidate([fx.P("p1"), fx.P("0")])


@pytest.mark.parametrize("variant", ["gnh", "extended", "hinds"])
def test_krupkova_family_passes(variant):
    fx = load("krupkova")
    v = verify_candidate(cand(fx, "c", "c", "0"), chain_for(fx, variant), variant)
    assert v.passed


def test_barcelos_forced_candidate_is_not_admissible():
    fx = load("barcelos")
    v = verify_candidate(cand(fx, "q2 + q3", "0", "q4", "0"), fx.chain)
    assert v.image_in_M1.passed and not v.closed.passed and not v.hj_equation.passed
    # the printed claim violates the image condition
    printed = verify_candidate(cand(fx, "0", "0", "0", "0"), fx.chain)
    assert not printed.image_in_M1.passed


def test_sundermeyer_candidate():
    fx = load("sundermeyer")
    g = cand(fx, "q2", "q1")
    v = verify_candidate(g, fx.chain)
    assert v.passed
    assert [format_expr(x) for x in project_field(solve_dynamics(fx.chain), g, fx.chain)] == ["0", "f1"]
    assert hj_residual(g, fx.chain).full == [fx.P("0")] * 2


def test_gotay_nester_candidate_and_residual():
    fx = load("gotay-nester")
    g = cand(fx, "q1", "0")
    v = verify_candidate(g, fx.chain)
    assert v.passed
    res = hj_residual(g, fx.chain)
    assert all(x.is_zero() for x in res.full) and list(res.transverse) == [fx.table["q1"]]
    assert [format_expr(x) for x in project_field(solve_dynamics(fx.chain), g, fx.chain)] == ["f1"]


def test_gotay_only_zero():
    fx = load("gotay")
    assert verify_candidate(cand(fx, "0", "0"), fx.chain).passed
    assert not verify_candidate(cand(fx, "0", "q1"), fx.chain).image_in_Mf.passed
    assert not verify_candidate(cand(fx, "1", "0"), fx.chain).image_in_M1.passed


def test_skinner_rusk_candidates():
    fx = load("skinner-rusk")
    assert verify_candidate(cand(fx, "0", "0", "q3"), fx.chain, "gnh").passed
    exact = cand(fx, "q3", "0", "q1")
    plain = verify_candidate(exact, fx.chain, "gnh")
    assert plain.preconditions and not plain.hj_equation.passed
    assert {k.display(): format_expr(x) for k, x in plain.residual.transverse.items()} == {"q3": "q1"}
    assert plain.residual.tangential == [fx.P("0")] * 2
    assert verify_candidate(exact, fx.chain, "extended").passed


def test_zero_field_projects_to_zero():
    from singlag.geom import VectorFieldSolution

    fx = load("gotay-nester")
    X = VectorFieldSolution(fx.chain.m_f, [fx.P("0")], [], [])
    assert project_field(X, cand(fx, "q1", "0"), fx.chain) == [fx.P("0")]


@pytest.mark.parametrize("name", PAPER_FIXTURES)
@pytest.mark.parametrize("variant", ["gnh", "extended", "hinds"])
def test_equivalence_on_fixture_candidates(name, variant):
    fx = load(name)
    for comps in fx.spec.gamma_exprs.values():
        v = verify_candidate(OneFormCandidate(comps), chain_for(fx, variant), variant)
        if v.preconditions:
            assert v.hj_equation.passed == v.related.passed


@settings(max_examples=25, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_equivalence_on_random_affine_candidates(a, b, c, d):
    # gamma = (a + b*q3, 0, c + b*q1 + d*q3) is exact on Skinner-Rusk configuration space
    fx = load("skinner-rusk")
    g = cand(fx, f"{a} + {b}*q3", "0", f"{c} + {b}*q1 + {d}*q3")
    for variant in ("gnh", "extended", "hinds"):
        v = verify_candidate(g, chain_for(fx, variant), variant)
        assert v.equivalence_holds


@pytest.mark.parametrize(
    "name, degree, expected",
    [
        ("krupkova", 0, [["a10", "a10", "0"]]),
        ("sundermeyer", 1, [["q2 + a10", "q1"]]),
        ("gotay", 1, [["0", "0"]]),
        ("skinner-rusk", 1, [["0", "0", "q3*a33 + a30"]]),
    ],
)
def test_ansatz_families(name, degree, expected):
    res = ansatz_search(load(name).chain, degree)
    assert res.status == "solved"
    assert [c.to_json() for c in res.candidates] == expected


def test_ansatz_barcelos_empty():
    assert ansatz_search(load("barcelos").chain, 1).status == "empty"


@pytest.mark.parametrize("name", PAPER_FIXTURES)
@pytest.mark.parametrize("variant", ["gnh", "extended", "hinds"])
def test_ansatz_candidates_verify(name, variant):
    fx = load(name)
    ch = chain_for(fx, variant)
    res = ansatz_search(ch, 1, variant)
    for c in res.candidates if res.status == "solved" else []:
        assert verify_candidate(c, ch, variant).passed


def test_skinner_rusk_ansatz_contains_paper_solution():
    fx = load("skinner-rusk")
    fam = ansatz_search(fx.chain, 1).candidates[0]
    coefs = sorted({s for c in fam.components for s in c.symbols() if s.kind == "coef"})
    from singlag.symcore import Expr

    inst = [c.subs({coefs[0]: Expr(0), coefs[1]: Expr(1)}) for c in fam.components]
    assert [format_expr(x) for x in inst] == ["0", "0", "q3"]


@pytest.mark.parametrize("name", PAPER_FIXTURES)
def test_extension_invariance(name):
    fx = load(name)
    n = fx.sys.n
    mult = {j + 1: fx.P(f"q1^{j + 1} + {j}") for j in range(len(fx.leg.primary_constraints))}
    for comps in fx.spec.gamma_exprs.values():
        g = OneFormCandidate(comps)
        if verify_candidate(g, fx.chain).image_in_M1.passed:
            assert extension_invariance(g, fx.chain, mult).is_zero()
