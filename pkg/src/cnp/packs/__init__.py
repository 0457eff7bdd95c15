"""Built-in primitive packs shipped with the runtime.

Each pack module exposes ``make_defs(console, base_dir)`` returning fresh
primitive definitions: pack state (journals, positions) is per registry, so
every run starts clean.
"""

from __future__ import annotations

from pathlib import Path

from ..console import Console
from ..primitives import PrimitiveDef
from . import bmi, mb_files, monkey_banana

_FACTORIES = (monkey_banana.make_defs, mb_files.make_defs, bmi.make_defs)


def native_catalog(console: Console, base_dir: Path) -> dict[str, PrimitiveDef]:
    """Name -> definition for every built-in primitive; names are unique
    across packs."""
    catalog: dict[str, PrimitiveDef] = {}
    for factory in _FACTORIES:
        for definition in factory(console, base_dir):
            assert definition.name not in catalog, definition.name
            catalog[definition.name] = definition
    return catalog
