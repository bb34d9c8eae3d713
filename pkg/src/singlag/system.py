"""Line-oriented system files.

Each non-blank line is ``key = value``; ``#`` starts a comment.  Recognised keys:

    dim, lagrangian, constants, extension, gamma.<label>, max_steps,
    ansatz_degree, variants, excluded

plus ``reference.*`` keys recording values printed in a source that the
analysis should compare against (``reference.h1``, ``reference.kernel.<k>``,
``reference.dynamics``, ``reference.gamma.<k>``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ExprSyntaxError, UnknownSymbol, ValidationError
from .gnh import DEFAULT_MAX_STEPS
from .legendre import LagrangianSystem
from .symcore import Expr, parse_expr, symbol_table

ALL_VARIANTS = ("gnh", "hinds", "extended", "lagrangian_side")
_KEY = re.compile(r"^(dim|lagrangian|constants|extension|max_steps|ansatz_degree|variants|excluded|gamma\.\w+|reference\.(h1|dynamics|kernel\.\w+|gamma\.\w+))$")


class SystemFileError(ValidationError):
    def __init__(self, source, line, column, message):
        self.line, self.column = line, column
        super().__init__(f"{source}:{line}:{column}: {message}")


@dataclass
class Entry:
    text: str
    line: int
    column: int


@dataclass
class SystemSpec:
    dim: int
    lagrangian: str
    constants: tuple = ()
    extension: str | None = None
    gammas: dict = field(default_factory=dict)  # label -> list of component texts
    max_steps: int = DEFAULT_MAX_STEPS
    ansatz_degree: int = 1
    variants: tuple = ALL_VARIANTS
    excluded: tuple = ()
    references: dict = field(default_factory=dict)  # key -> text
    source: str = "<string>"
    # parsed forms
    system: LagrangianSystem | None = None
    extension_expr: Expr | None = None
    gamma_exprs: dict = field(default_factory=dict)
    reference_exprs: dict = field(default_factory=dict)

    @property
    def table(self) -> dict:
        return symbol_table(self.dim, self.constants)

    def to_json(self) -> dict:
        out = {
            "dim": self.dim,
            "lagrangian": self.lagrangian,
            "constants": list(self.constants),
            "excluded": list(self.excluded),
            "variants": list(self.variants),
            "max_steps": self.max_steps,
            "ansatz_degree": self.ansatz_degree,
        }
        if self.extension is not None:
            out["extension"] = self.extension
        if self.gammas:
            out["gamma"] = {k: v for k, v in self.gammas.items()}
        return out


def _split(value: str) -> list[str]:
    return [x.strip() for x in value.split(",")]


def _parse_at(entry: Entry, table, source: str, allowed=None) -> Expr:
    try:
        e = parse_expr(entry.text, table)
    except ExprSyntaxError as err:
        raise SystemFileError(source, entry.line, entry.column + err.position, str(err)) from None
    except UnknownSymbol as err:
        col = entry.column + (err.position or 0)
        raise SystemFileError(source, entry.line, col, str(err)) from None
    if allowed is not None:
        bad = sorted(s.name for s in e.symbols() if s.kind not in allowed)
        if bad:
            raise SystemFileError(source, entry.line, entry.column, f"symbols {bad} not allowed here")
    return e


def _list_entries(entry: Entry) -> list[Entry]:
    out, col = [], entry.column
    for part in entry.text.split(","):
        lead = len(part) - len(part.lstrip())
        out.append(Entry(part.strip(), entry.line, col + lead))
        col += len(part) + 1
    return out


def parse_system(text: str, source: str = "<string>") -> SystemSpec:
    raw: dict[str, Entry] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            raise SystemFileError(source, lineno, 1, "expected 'key = value'")
        key, value = body.split("=", 1)
        key = key.strip()
        if not _KEY.match(key):
            raise SystemFileError(source, lineno, 1, f"unknown key {key!r}")
        if key in raw:
            raise SystemFileError(source, lineno, 1, f"duplicate key {key!r}")
        col = len(body) - len(value) + (len(value) - len(value.lstrip())) + 1
        raw[key] = Entry(value.strip(), lineno, col)

    for required in ("dim", "lagrangian"):
        if required not in raw:
            raise SystemFileError(source, 1, 1, f"missing key {required!r}")

    def integer(key, default, minimum):
        if key not in raw:
            return default
        e = raw[key]
        try:
            val = int(e.text)
        except ValueError:
            raise SystemFileError(source, e.line, e.column, f"{key} must be an integer") from None
        if val < minimum:
            raise SystemFileError(source, e.line, e.column, f"{key} must be at least {minimum}")
        return val

    dim = integer("dim", None, 1)
    constants = tuple(_split(raw["constants"].text)) if "constants" in raw and raw["constants"].text else ()
    for c in constants:
        if not re.fullmatch(r"[A-Za-z_]\w*", c) or re.fullmatch(r"[qvpu]\d+", c):
            e = raw["constants"]
            raise SystemFileError(source, e.line, e.column, f"invalid constant name {c!r}")
    variants = ALL_VARIANTS
    if "variants" in raw:
        variants = tuple(_split(raw["variants"].text))
        for v in variants:
            if v not in ALL_VARIANTS:
                e = raw["variants"]
                raise SystemFileError(source, e.line, e.column, f"unknown variant {v!r}")

    spec = SystemSpec(
        dim=dim,
        lagrangian=raw["lagrangian"].text,
        constants=constants,
        extension=raw["extension"].text if "extension" in raw else None,
        max_steps=integer("max_steps", DEFAULT_MAX_STEPS, 1),
        ansatz_degree=integer("ansatz_degree", 1, 0),
        variants=variants,
        excluded=tuple(_split(raw["excluded"].text)) if "excluded" in raw else (),
        source=source,
    )
    table = spec.table
    L = _parse_at(raw["lagrangian"], table, source, allowed={"q", "v", "const"})
    excluded = []
    if "excluded" in raw:
        for ent in _list_entries(raw["excluded"]):
            e = _parse_at(ent, table, source, allowed={"q", "const"})
            if not e.is_polynomial() or e.is_constant():
                raise SystemFileError(source, ent.line, ent.column, "excluded entries must be nonconstant polynomials")
            excluded.append(e.num)
    spec.system = LagrangianSystem(dim, L, tuple(excluded), constants)
    if spec.extension is not None:
        spec.extension_expr = _parse_at(raw["extension"], table, source, allowed={"q", "p", "const"})

    for key in sorted(raw, key=_natural):
        ent = raw[key]
        if key.startswith("gamma."):
            label = key[len("gamma."):]
            comps = _list_entries(ent)
            _arity(comps, dim, source, ent)
            spec.gammas[label] = [c.text for c in comps]
            spec.gamma_exprs[label] = [_parse_at(c, table, source, allowed={"q", "const"}) for c in comps]
        elif key.startswith("reference."):
            name = key[len("reference."):]
            spec.references[name] = ent.text
            if name == "h1":
                spec.reference_exprs[name] = _parse_at(ent, table, source, allowed={"q", "p", "const"})
            else:
                comps = _list_entries(ent)
                if name.startswith("gamma.") or name == "dynamics":
                    _arity(comps, dim, source, ent)
                spec.reference_exprs[name] = [_parse_at(c, table, source) for c in comps]
    return spec


def _arity(comps, dim, source, ent):
    if len(comps) != dim:
        raise SystemFileError(source, ent.line, ent.column, f"expected {dim} components, got {len(comps)}")


def _natural(key: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", key)]


def load_system(path) -> SystemSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise ValidationError(f"cannot read {path}: {err}") from None
    return parse_system(text, path.name)
