"""Reference formulas shipped as JSON data files next to this module."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .emit import from_json
from .symexpr import SymExpr, canonicalize

_PACKAGE_DIR = "data"


def available() -> list[str]:
    root = resources.files(__package__).joinpath(_PACKAGE_DIR)
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


@lru_cache(maxsize=None)
def load_raw(name: str) -> dict:
    path = resources.files(__package__).joinpath(_PACKAGE_DIR, f"{name}.json")
    return json.loads(path.read_text())


def load(name: str, canonical: bool = True) -> SymExpr:
    """The named formula; argument shifts are removed unless ``canonical`` is False."""
    e = from_json(load_raw(name))
    return canonicalize(e) if canonical else e
