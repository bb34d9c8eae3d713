"""Bundled system files and their golden reports."""
from __future__ import annotations

from pathlib import Path

FIXTURE_DIR = Path(__file__).parent
GOLDEN_DIR = FIXTURE_DIR / "golden"


def names() -> list[str]:
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.sys"))


def path(name: str) -> Path:
    return FIXTURE_DIR / f"{name}.sys"


def golden_path(name: str) -> Path:
    return GOLDEN_DIR / f"{name}.json"
