"""Deterministic printing in the input grammar (so printed text re-parses)."""
from __future__ import annotations

from fractions import Fraction


def format_coef(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_monomial(m) -> str:
    parts = []
    for s, e in m:
        name = s.display()
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _format_term(m, c: Fraction) -> str:
    a = abs(c)
    if not m:
        return format_coef(a)
    mono = format_monomial(m)
    if a == 1:
        return mono
    return f"{format_coef(a)}*{mono}"


def format_poly(p) -> str:
    if not p.terms:
        return "0"
    out = []
    for i, (m, c) in enumerate(p.sorted_terms()):
        body = _format_term(m, c)
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def _needs_parens(p) -> bool:
    if len(p.terms) != 1:
        return True
    (m, c), = p.terms.items()
    return c != 1 or len(m) > 1


def format_expr(e) -> str:
    if e.den.is_constant():
        return format_poly(e.num)
    num = format_poly(e.num)
    if len(e.num.terms) > 1 or num.startswith("-"):
        num = f"({num})"
    den = format_poly(e.den)
    if _needs_parens(e.den):
        den = f"({den})"
    return f"{num}/{den}"
