import sympy
import pytest
from hypothesis import strategies as st

from singlag import fixtures
from singlag.gnh import run_gnh, run_hinds
from singlag.legendre import legendre_analysis
from singlag.symcore import Expr, format_expr, parse_expr, symbol_table
from singlag.system import load_system

PAPER_FIXTURES = ["krupkova", "barcelos", "sundermeyer", "gotay-nester", "gotay", "skinner-rusk"]


def to_sympy(e: Expr):
    """Independent reading of an expression through its printed form."""
    return sympy.sympify(format_expr(e).replace("^", "**"))


def sym_equal(e: Expr, text: str) -> bool:
    return sympy.simplify(to_sympy(e) - sympy.sympify(text.replace("^", "**"))) == 0


class Loaded:
    def __init__(self, name):
        self.name = name
        self.spec = load_system(fixtures.path(name))
        self.sys = self.spec.system
        self.table = self.spec.table
        self._cache = {}

    def P(self, text):
        return parse_expr(text, self.table)

    def get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def leg(self):
        return self.get("leg", lambda: legendre_analysis(self.sys, self.spec.extension_expr))

    @property
    def chain(self):
        return self.get("gnh", lambda: run_gnh(self.sys, self.leg))

    @property
    def hinds(self):
        return self.get("hinds", lambda: run_hinds(self.sys, self.leg))


_loaded = {}


def load(name) -> Loaded:
    if name not in _loaded:
        _loaded[name] = Loaded(name)
    return _loaded[name]


@pytest.fixture(params=PAPER_FIXTURES)
def paper_fixture(request):
    return load(request.param)


def small_poly(names, max_terms=4, max_deg=3):
    """Hypothesis strategy for polynomial source text over the given names."""
    coef = st.integers(-3, 3).filter(lambda c: c != 0)
    mono = st.lists(st.sampled_from(names), min_size=0, max_size=max_deg)
    term = st.tuples(coef, mono).map(lambda t: "*".join([f"({t[0]})"] + t[1]))
    return st.lists(term, min_size=1, max_size=max_terms).map(lambda ts: " + ".join(ts))


def table(n=2, constants=()):
    return symbol_table(n, constants)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    lines = test_acceptance.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
