"""Primitive manifest: which built-ins a program uses and how its foreign
primitives are launched. A TOML file next to the ``.cn`` program:

    natives = ["InitFiles", "PushFiles", "PrintFiles", "AtFiles"]

    [[foreigns]]
    name = "WalkPy"
    params = ["in", "in"]
    forward = ["python3", "../../py_primitives/walk_fw.py", "{1}", "{2}"]
    backward = ["python3", "../../py_primitives/walk_bw.py", "{1}", "{2}"]

Relative program paths run with the network file's directory as working
directory.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .console import Console
from .foreign import (
    CaptureMode,
    ForeignError,
    ForeignPrimitiveSpec,
    TokenMap,
    WaitMode,
    make_primitive,
)
from .packs import native_catalog
from .primitives import ParamMode, PrimitiveRegistry


class ManifestError(Exception):
    pass


@dataclass(frozen=True)
class Manifest:
    natives: tuple[str, ...] = ()
    foreigns: tuple[ForeignPrimitiveSpec, ...] = ()


_FOREIGN_KEYS = {"name", "params", "forward", "backward", "wait", "capture", "result_slot", "test"}


def load_manifest(path: Path) -> Manifest:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ManifestError(f"{path}: {exc}") from exc
    unknown = set(data) - {"natives", "foreigns"}
    if unknown:
        raise ManifestError(f"{path}: unknown top-level keys {sorted(unknown)}")
    natives = _str_list(data.get("natives", []), f"{path}: natives")
    foreigns = [_parse_foreign(entry, path) for entry in data.get("foreigns", [])]
    names = list(natives) + [f.name for f in foreigns]
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        raise ManifestError(f"{path}: duplicate primitive names {sorted(dupes)}")
    return Manifest(tuple(natives), tuple(foreigns))


def _parse_foreign(entry: object, path: Path) -> ForeignPrimitiveSpec:
    if not isinstance(entry, dict):
        raise ManifestError(f"{path}: each [[foreigns]] entry must be a table")
    unknown = set(entry) - _FOREIGN_KEYS
    if unknown:
        raise ManifestError(f"{path}: unknown foreign keys {sorted(unknown)}")
    try:
        name = entry["name"]
        forward = tuple(_str_list(entry["forward"], f"{path}: {name}.forward"))
    except KeyError as exc:
        raise ManifestError(f"{path}: foreign entry missing {exc}") from None
    modes = []
    for mode in entry.get("params", []):
        try:
            modes.append(ParamMode(mode))
        except ValueError:
            raise ManifestError(f"{path}: {name}: param mode must be 'in' or 'out', got {mode!r}") from None
    backward = entry.get("backward")
    if backward is not None:
        backward = tuple(_str_list(backward, f"{path}: {name}.backward"))
    test = entry.get("test")
    test_map = None
    if test is not None:
        if not isinstance(test, dict) or set(test) - {"success", "failure"}:
            raise ManifestError(f"{path}: {name}: test table takes only 'success' and 'failure'")
        test_map = TokenMap(str(test.get("success", "1")), str(test.get("failure", "0")))
    try:
        return ForeignPrimitiveSpec(
            name=name,
            forward_cmd=forward,
            param_modes=tuple(modes),
            backward_cmd=backward,
            wait=WaitMode(entry.get("wait", "sync")),
            capture=CaptureMode(entry.get("capture", "none")),
            result_slot=entry.get("result_slot"),
            test_map=test_map,
        )
    except ValueError as exc:
        raise ManifestError(f"{path}: {name}: {exc}") from exc
    except ForeignError as exc:
        raise ManifestError(f"{path}: {exc}") from exc


def _str_list(value: object, what: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ManifestError(f"{what} must be a list of strings")
    return value


def build_registry(manifest: Manifest, console: Console, base_dir: Path) -> PrimitiveRegistry:
    """Instantiate the enabled built-ins and foreign wrappers into a fresh
    registry; pack state starts clean per call."""
    registry = PrimitiveRegistry()
    catalog = native_catalog(console, base_dir)
    for name in manifest.natives:
        if name not in catalog:
            raise ManifestError(f"unknown built-in primitive {name!r} (have: {', '.join(sorted(catalog))})")
        registry.register(catalog[name])
    for spec in manifest.foreigns:
        registry.register(make_primitive(spec, base_dir))
    return registry
