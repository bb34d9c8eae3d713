"""Command line entry point: ``singlag analyze`` and ``singlag fixtures``."""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from . import fixtures
from .errors import AnalysisError
from .report import analyze, emit_json, emit_text
from .system import ALL_VARIANTS, load_system


def _analyze_cmd(args) -> int:
    try:
        spec = load_system(args.file)
    except AnalysisError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    if args.variant:
        spec.variants = tuple(v for v in ALL_VARIANTS if v in args.variant)
    report = analyze(spec)
    out = emit_text(report) if args.format == "text" else emit_json(report)
    sys.stdout.write(out)
    if report.exit_code:
        msg = report.data.get("outcome", {}).get("message", "")
        print(f"error: {msg}", file=sys.stderr)
    return report.exit_code


def render_fixture(name: str) -> tuple[str, str, int]:
    spec = load_system(fixtures.path(name))
    report = analyze(spec)
    return name, emit_json(report), report.exit_code


def _fixtures_run(args) -> int:
    names = args.names or fixtures.names()
    unknown = [n for n in names if n not in fixtures.names()]
    if unknown:
        print(f"error: unknown fixtures {unknown}", file=sys.stderr)
        return 2
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(render_fixture, names))
    else:
        results = [render_fixture(n) for n in names]
    failed = 0
    for name, text, code in results:
        golden = fixtures.golden_path(name)
        if args.update:
            golden.parent.mkdir(parents=True, exist_ok=True)
            golden.write_text(text, encoding="utf-8")
            print(f"updated  {name}")
            continue
        if not golden.exists():
            print(f"MISSING  {name}")
            failed += 1
        elif golden.read_text(encoding="utf-8") == text:
            print(f"ok       {name} (exit {code})")
        else:
            print(f"DIFFERS  {name}")
            failed += 1
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="singlag", description="Constraint and Hamilton-Jacobi analysis of singular Lagrangians")
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="analyze a system file")
    an.add_argument("file")
    fmt = an.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--text", dest="format", action="store_const", const="text")
    an.add_argument("--variant", action="append", choices=ALL_VARIANTS, help="restrict to these variants (repeatable)")
    an.set_defaults(format="json", func=_analyze_cmd)

    fx = sub.add_parser("fixtures", help="bundled fixture corpus")
    fsub = fx.add_subparsers(dest="fixtures_command", required=True)
    ls = fsub.add_parser("list", help="list fixture names")
    ls.set_defaults(func=lambda a: print("\n".join(fixtures.names())) or 0)
    run = fsub.add_parser("run", help="compare fixture reports with the stored golden files")
    run.add_argument("names", nargs="*")
    run.add_argument("--update", action="store_true", help="rewrite the golden files")
    run.add_argument("--jobs", type=int, default=1)
    run.set_defaults(func=_fixtures_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
