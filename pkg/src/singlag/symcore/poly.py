"""Sparse multivariate polynomials with exact rational coefficients."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from ..errors import DegreeOverflow
from . import kernels as K
from .symbols import Symbol

MAX_DEGREE = 32
_SENTINEL = ((99,), 0)


def mono_degree(m) -> int:
    return sum(e for _, e in m)


def _lex_key(m):
    # smaller key = lexicographically larger monomial (earlier symbols weigh more)
    return tuple((s, -e) for s, e in m) + (_SENTINEL,)


def order_key(m):
    """Sort key putting monomials in descending graded-lex order."""
    return (-mono_degree(m), _lex_key(m))


def _coerce_coef(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    return Fraction(c)


class Poly:
    """Immutable sparse polynomial.  ``terms`` never holds zero coefficients."""

    __slots__ = ("terms", "_deg")

    def __init__(self, terms: Mapping | None = None):
        self.terms = dict(terms) if terms else {}
        self._deg = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = object.__new__(cls)
        p.terms = terms
        p._deg = None
        return p

    @classmethod
    def const(cls, c) -> "Poly":
        c = _coerce_coef(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def sym(cls, s: Symbol, exp: int = 1) -> "Poly":
        return cls._raw({((s, exp),): Fraction(1)})

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def degree(self) -> int:
        if self._deg is None:
            self._deg = max((mono_degree(m) for m in self.terms), default=0)
        return self._deg

    def degree_in(self, syms: Iterable[Symbol]) -> int:
        syms = set(syms)
        return max((sum(e for s, e in m if s in syms) for m in self.terms), default=0)

    def symbols(self) -> set[Symbol]:
        out = set()
        for m in self.terms:
            for s, _ in m:
                out.add(s)
        return out

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: order_key(t[0]))

    def leading_term(self):
        if not self.terms:
            return (), Fraction(0)
        m = min(self.terms, key=order_key)
        return m, self.terms[m]

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        return Poly._raw(K.add_terms(self.terms, other.terms))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        return Poly._raw(K.sub_terms(self.terms, other.terms))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __neg__(self):
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = _as_poly(other)
        if self.terms and other.terms and self.degree() + other.degree() > MAX_DEGREE:
            raise DegreeOverflow(
                f"polynomial degree {self.degree() + other.degree()} exceeds cap {MAX_DEGREE}"
            )
        return Poly._raw(K.mul_terms(self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        if self.terms and self.degree() * n > MAX_DEGREE:
            raise DegreeOverflow(f"polynomial degree {self.degree() * n} exceeds cap {MAX_DEGREE}")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "Poly":
        return Poly._raw(K.scale_terms(self.terms, _coerce_coef(c)))

    def diff(self, s: Symbol) -> "Poly":
        return Poly._raw(K.diff_terms(self.terms, s))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    # -- division ---------------------------------------------------------
    def exact_div(self, other: "Poly") -> "Poly | None":
        """Quotient if ``other`` divides ``self`` exactly, else ``None``."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if other.is_constant():
            return self.scale(1 / other.constant_value())
        lm, lc = other.leading_term()
        lm_d = dict(lm)
        rem = dict(self.terms)
        quot: dict = {}
        while rem:
            m = min(rem, key=order_key)
            c = rem[m]
            md = dict(m)
            if any(md.get(s, 0) < e for s, e in lm_d.items()):
                return None
            qm = tuple(sorted(((s, md[s] - lm_d.get(s, 0)) for s in md if md[s] - lm_d.get(s, 0) > 0)))
            qc = c / lc
            quot[qm] = qc
            rem = K.sub_terms(rem, K.mul_terms({qm: qc}, other.terms))
        return Poly._raw(quot)

    def monomial_content(self):
        """Largest monomial dividing every term."""
        it = iter(self.terms)
        try:
            first = dict(next(it))
        except StopIteration:
            return ()
        for m in it:
            md = dict(m)
            first = {s: min(e, md[s]) for s, e in first.items() if s in md}
            if not first:
                return ()
        return tuple(sorted(first.items()))

    def div_monomial(self, mono) -> "Poly":
        if not mono:
            return self
        md = dict(mono)
        out = {}
        for m, c in self.terms.items():
            nm = tuple((s, e - md.get(s, 0)) for s, e in m if e - md.get(s, 0) > 0)
            out[nm] = c
        return Poly._raw(out)

    # -- evaluation -------------------------------------------------------
    def evaluate(self, point: Mapping[Symbol, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for s, e in m:
                t *= point[s] ** e
            total += t
        return total

    def coefficients_in(self, syms: Iterable[Symbol]) -> dict:
        """Group terms by the monomial in ``syms``; values are Polys in the rest."""
        syms = set(syms)
        groups: dict = {}
        for m, c in self.terms.items():
            key = tuple(pair for pair in m if pair[0] in syms)
            rest = tuple(pair for pair in m if pair[0] not in syms)
            groups.setdefault(key, {})[rest] = c
        return {k: Poly._raw(v) for k, v in groups.items()}

    def __repr__(self):
        from .printer import format_poly

        return f"Poly({format_poly(self)})"


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    if isinstance(x, Symbol):
        return Poly.sym(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Poly")
