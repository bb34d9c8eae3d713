"""Symbols of the expression layer.

A symbol is an immutable tuple ``(rank, index, name, deriv)``.  Tuple order is
the declared variable order used by the monomial ordering: momenta first, then
positions, velocities, multipliers, user constants, free functions and finally
ansatz coefficients.  ``deriv`` is only used by free-function symbols and holds
the (sorted) coordinates a formal partial derivative was taken along.
"""
from __future__ import annotations

from typing import NamedTuple

KIND_RANK = {
    "p": 0,
    "q": 1,
    "v": 2,
    "u": 3,
    "const": 4,
    "free": 5,
    "coef": 6,
}
RANK_KIND = {r: k for k, r in KIND_RANK.items()}


class Symbol(NamedTuple):
    rank: int
    index: int
    name: str
    deriv: tuple = ()

    @property
    def kind(self) -> str:
        return RANK_KIND[self.rank]

    def __repr__(self) -> str:
        return self.display()

    def __str__(self) -> str:
        return self.display()

    def display(self) -> str:
        if not self.deriv:
            return self.name
        return self.name + "_" + "_".join(s.name for s in self.deriv)

    def partial(self, coord: "Symbol") -> "Symbol":
        """Formal partial derivative of a free-function symbol along ``coord``."""
        if self.rank != KIND_RANK["free"]:
            raise ValueError(f"{self} is not a free-function symbol")
        return Symbol(self.rank, self.index, self.name, tuple(sorted(self.deriv + (coord,))))

    @property
    def base(self) -> "Symbol":
        return Symbol(self.rank, self.index, self.name)


def q(i: int) -> Symbol:
    return Symbol(KIND_RANK["q"], i, f"q{i}")


def v(i: int) -> Symbol:
    return Symbol(KIND_RANK["v"], i, f"v{i}")


def p(i: int) -> Symbol:
    return Symbol(KIND_RANK["p"], i, f"p{i}")


def u(i: int) -> Symbol:
    return Symbol(KIND_RANK["u"], i, f"u{i}")


def const(name: str) -> Symbol:
    return Symbol(KIND_RANK["const"], 0, name)


def free(i: int, stem: str = "f") -> Symbol:
    return Symbol(KIND_RANK["free"], i, f"{stem}{i}")


def coef(i: int, name: str | None = None) -> Symbol:
    return Symbol(KIND_RANK["coef"], i, name or f"a{i}")


def qs(n: int) -> list[Symbol]:
    return [q(i) for i in range(1, n + 1)]


def vs(n: int) -> list[Symbol]:
    return [v(i) for i in range(1, n + 1)]


def ps(n: int) -> list[Symbol]:
    return [p(i) for i in range(1, n + 1)]


def symbol_table(n: int, constants=(), extra=()) -> dict[str, Symbol]:
    """Name -> Symbol map for a system of dimension ``n``."""
    table: dict[str, Symbol] = {}
    for s in qs(n) + vs(n) + ps(n):
        table[s.name] = s
    for name in constants:
        table[name] = const(name)
    for s in extra:
        table[s.name] = s
    return table
