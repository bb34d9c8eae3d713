"""Square-free cleaning of constraint numerators.

Factoring is delegated to sympy; only the conversion to and from our
polynomial type lives here.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import sympy

from .symcore import Poly, Symbol


def _gens(polys: Sequence[Poly]) -> list[Symbol]:
    syms: set[Symbol] = set()
    for p in polys:
        syms |= p.symbols()
    return sorted(syms)


def _to_sympy(p: Poly, gens: list[Symbol], sgens) -> sympy.Poly:
    idx = {s: i for i, s in enumerate(gens)}
    data = {}
    for mono, c in p.terms.items():
        exps = [0] * len(gens)
        for s, e in mono:
            exps[idx[s]] = e
        data[tuple(exps)] = sympy.Rational(c.numerator, c.denominator)
    return sympy.Poly.from_dict(data, *sgens, domain="QQ")


def _from_sympy(sp: sympy.Poly, gens: list[Symbol]) -> Poly:
    terms = {}
    for exps, c in sp.terms():
        mono = tuple((gens[i], e) for i, e in enumerate(exps) if e)
        terms[tuple(sorted(mono))] = Fraction(int(c.p), int(c.q))
    return Poly(terms)


def monic(p: Poly) -> Poly:
    lc = p.leading_coefficient()
    return p if lc == 1 else p.scale(1 / lc)


def irreducible_factors(p: Poly) -> list[Poly]:
    """Distinct monic irreducible factors of a nonconstant polynomial."""
    if p.is_constant():
        return []
    return list(_factors_cached(p))


@lru_cache(maxsize=4096)
def _factors_cached(p: Poly) -> tuple:
    gens = _gens([p])
    if len(gens) == 1 and p.degree() == 1:
        return (monic(p),)
    sgens = sympy.symbols(" ".join(f"x{i}" for i in range(len(gens))) + " _pad")[: len(gens)]
    _, facs = _to_sympy(p, gens, sgens).factor_list()
    out = {monic(_from_sympy(f, gens)) for f, _ in facs}
    return tuple(sorted(out, key=lambda f: sorted(f.terms.items())))


def clean_numerator(p: Poly, excluded: Sequence[Poly]) -> list[Poly]:
    """Irreducible factors of ``p`` that may vanish on the domain.

    Constants and factors of excluded polynomials never vanish, so they are
    dropped; multiplicities are dropped too (radical).
    """
    nonvanishing = set()
    for ex in excluded:
        nonvanishing.update(irreducible_factors(ex))
    return [f for f in irreducible_factors(p) if f not in nonvanishing]
