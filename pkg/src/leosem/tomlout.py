"""Minimal TOML emitter for the scenario/report schema.

Supports the subset this package serializes: tables of scalars, nested
tables, arrays of scalars, and arrays of tables.  Output is deterministic
(insertion order preserved) so emitted documents are byte-stable.
"""

from __future__ import annotations

import re

_BARE_KEY = re.compile(r"^[A-Za-z0-9_-]+$")


def _key(k: str) -> str:
    if _BARE_KEY.match(k):
        return k
    return '"' + k.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if v != v or v in (float("inf"), float("-inf")):
            return {float("inf"): "inf", float("-inf"): "-inf"}.get(v, "nan")
        r = repr(v)
        # repr of a whole float may be "1e+10"; both forms are valid TOML
        return r
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
    raise TypeError(f"cannot serialize {type(v).__name__} as TOML scalar")


def _is_table_array(v) -> bool:
    return isinstance(v, (list, tuple)) and len(v) > 0 and all(isinstance(e, dict) for e in v)


def dumps(doc: dict) -> str:
    """Serialize a nested dict to TOML text."""
    lines: list[str] = []
    _emit_table(doc, (), lines)
    return "\n".join(lines) + "\n"


def _emit_table(tbl: dict, path: tuple[str, ...], lines: list[str]) -> None:
    scalars = []
    subtables = []
    table_arrays = []
    for k, v in tbl.items():
        if isinstance(v, dict):
            subtables.append((k, v))
        elif _is_table_array(v):
            table_arrays.append((k, v))
        else:
            scalars.append((k, v))

    if path and (scalars or not (subtables or table_arrays)):
        if lines:
            lines.append("")
        lines.append("[" + ".".join(_key(p) for p in path) + "]")
    for k, v in scalars:
        if isinstance(v, (list, tuple)):
            lines.append(f"{_key(k)} = [{', '.join(_scalar(e) for e in v)}]")
        else:
            lines.append(f"{_key(k)} = {_scalar(v)}")
    for k, v in subtables:
        _emit_table(v, path + (k,), lines)
    for k, arr in table_arrays:
        for entry in arr:
            if lines:
                lines.append("")
            lines.append("[[" + ".".join(_key(p) for p in path + (k,)) + "]]")
            _emit_inline_entries(entry, path + (k,), lines)


def _emit_inline_entries(tbl: dict, path: tuple[str, ...], lines: list[str]) -> None:
    for k, v in tbl.items():
        if isinstance(v, dict):
            raise TypeError("nested tables inside a table array are not supported")
        if _is_table_array(v):
            raise TypeError("nested table arrays are not supported")
        if isinstance(v, (list, tuple)):
            lines.append(f"{_key(k)} = [{', '.join(_scalar(e) for e in v)}]")
        else:
            lines.append(f"{_key(k)} = {_scalar(v)}")
