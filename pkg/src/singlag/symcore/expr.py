"""Rational-function expressions over the rationals.

An ``Expr`` is a numerator/denominator pair of ``Poly``.  No multivariate gcd is
computed; equality is decided by cross-multiplication.  Cheap cancellations
(monomial content, exact division, monic denominator) keep forms small and
printing reproducible.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping

from ..errors import DivisionByExcluded, DivisionByZero
from .poly import Poly, _as_poly
from .symbols import KIND_RANK, Symbol

_FREE = KIND_RANK["free"]


class Expr:
    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        num = _as_poly(num)
        den = _as_poly(den)
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        self.num, self.den = _canonical(num, den)

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "Expr":
        e = object.__new__(cls)
        e.num = num
        e.den = den
        return e

    @classmethod
    def const(cls, c) -> "Expr":
        return cls._raw(Poly.const(c), Poly.const(1))

    @classmethod
    def sym(cls, s: Symbol) -> "Expr":
        return cls._raw(Poly.sym(s), Poly.const(1))

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("expression is not constant")
        return self.num.constant_value() / self.den.constant_value()

    def symbols(self) -> set[Symbol]:
        return self.num.symbols() | self.den.symbols()

    def free_symbols_of(self, rank: int) -> set[Symbol]:
        return {s for s in self.symbols() if s.rank == rank}

    def depends_on(self, syms: Iterable[Symbol]) -> bool:
        s = self.symbols()
        return any(x in s for x in syms)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = as_expr(other)
        if self.den == other.den:
            return Expr(self.num + other.num, self.den)
        return Expr(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_expr(other)
        if self.den == other.den:
            return Expr(self.num - other.num, self.den)
        return Expr(self.num * other.den - other.num * self.den, self.den * other.den)

    def __rsub__(self, other):
        return as_expr(other) - self

    def __neg__(self):
        return Expr._raw(-self.num, self.den)

    def __mul__(self, other):
        other = as_expr(other)
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        return Expr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_expr(other)
        if other.num.is_zero():
            raise DivisionByZero("division by the zero expression")
        return Expr(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return as_expr(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n >= 0:
            return Expr(self.num ** n, self.den ** n)
        if self.num.is_zero():
            raise DivisionByZero("negative power of zero")
        return Expr(self.den ** (-n), self.num ** (-n))

    def __eq__(self, other):
        try:
            other = as_expr(other)
        except TypeError:
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return (self.num * other.den - other.num * self.den).is_zero()

    __hash__ = None

    # -- calculus and substitution ---------------------------------------
    def diff(self, s: Symbol) -> "Expr":
        dn = self.num.diff(s)
        if self.den.is_constant():
            return Expr(dn, self.den)
        dd = self.den.diff(s)
        if dd.is_zero():
            return Expr(dn, self.den)
        return Expr(dn * self.den - self.num * dd, self.den * self.den)

    def subs(self, bindings: Mapping[Symbol, "Expr"]) -> "Expr":
        if not bindings:
            return self
        syms = self.symbols()
        relevant = {s: as_expr(b) for s, b in bindings.items() if s in syms}
        if not relevant:
            return self
        num = _subs_poly(self.num, relevant)
        den = _subs_poly(self.den, relevant)
        if den.is_zero():
            raise DivisionByExcluded("denominator vanishes after substitution")
        return num / den

    def evaluate(self, point: Mapping[Symbol, Fraction]) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise DivisionByZero("denominator vanishes at evaluation point")
        return self.num.evaluate(point) / d

    def __repr__(self):
        from .printer import format_expr

        return f"Expr({format_expr(self)})"

    def __str__(self):
        from .printer import format_expr

        return format_expr(self)


def _canonical(num: Poly, den: Poly):
    if num.is_zero():
        return num, Poly.const(1)
    if den.is_constant():
        c = den.constant_value()
        return (num if c == 1 else num.scale(1 / c)), Poly.const(1)
    # strip common monomial factors
    mc_n = num.monomial_content()
    if mc_n:
        mc_d = den.monomial_content()
        if mc_d:
            nd, dd = dict(mc_n), dict(mc_d)
            common = tuple(sorted((s, min(e, dd[s])) for s, e in nd.items() if s in dd))
            if common:
                num = num.div_monomial(common)
                den = den.div_monomial(common)
                if den.is_constant():
                    return num.scale(1 / den.constant_value()), Poly.const(1)
    if len(den.terms) > 1 or len(num.terms) >= len(den.terms):
        qt = num.exact_div(den)
        if qt is not None:
            return qt, Poly.const(1)
    if len(num.terms) > 1 and len(den.terms) > len(num.terms):
        qt = den.exact_div(num)
        if qt is not None:
            num, den = Poly.const(1), qt
    lc = den.leading_coefficient()
    if lc != 1:
        inv = 1 / lc
        num, den = num.scale(inv), den.scale(inv)
    return num, den


def _subs_poly(p: Poly, bindings: Mapping[Symbol, Expr]) -> Expr:
    polynomial = all(b.den.is_constant() and b.den.constant_value() == 1 for b in bindings.values())
    if polynomial:
        cache: dict = {}
        out = Poly()
        for m, c in p.terms.items():
            term = Poly.const(c)
            for s, e in m:
                b = bindings.get(s)
                if b is None:
                    term = term * Poly.sym(s, e)
                else:
                    key = (s, e)
                    pw = cache.get(key)
                    if pw is None:
                        pw = b.num ** e
                        cache[key] = pw
                    term = term * pw
            out = out + term
        return Expr._raw(out, Poly.const(1))
    cache_e: dict = {}
    total = ZERO
    for m, c in p.terms.items():
        term = Expr.const(c)
        for s, e in m:
            b = bindings.get(s)
            if b is None:
                term = term * Expr._raw(Poly.sym(s, e), Poly.const(1))
            else:
                key = (s, e)
                pw = cache_e.get(key)
                if pw is None:
                    pw = b ** e
                    cache_e[key] = pw
                term = term * pw
        total = total + term
    return total


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Expr.const(x)
    if isinstance(x, Symbol):
        return Expr.sym(x)
    if isinstance(x, Poly):
        return Expr._raw(x, Poly.const(1))
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


ZERO = Expr._raw(Poly(), Poly.const(1))
ONE = Expr._raw(Poly.const(1), Poly.const(1))


def diff(e: Expr, s: Symbol) -> Expr:
    return e.diff(s)


def substitute(e: Expr, bindings: Mapping[Symbol, Expr]) -> Expr:
    return e.subs(bindings)


def is_zero(e: Expr) -> bool:
    return e.is_zero()


def total_diff(
    e: Expr,
    coord: Symbol,
    free_partial: Callable[[Symbol, Symbol], Expr] | None = None,
) -> Expr:
    """Derivative along ``coord`` with free-function symbols differentiated too.

    Free-function symbols normally stay opaque.  Here each one contributes
    ``de/df * df/dcoord`` where ``df/dcoord`` is ``free_partial(f, coord)``,
    by default the formal partial symbol of ``f``.
    """
    out = e.diff(coord)
    for f in sorted(e.free_symbols_of(_FREE)):
        df = free_partial(f, coord) if free_partial else Expr.sym(f.partial(coord))
        if df.is_zero():
            continue
        out = out + e.diff(f) * df
    return out
