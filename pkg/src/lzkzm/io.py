"""CSV and JSON writers that stamp every file with the package version and config."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from . import __version__


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, np.generic):
        return _jsonable(v.item())
    return v


def meta_block(command: str, config: Mapping) -> dict:
    return {"package": "lzkzm", "version": __version__, "command": command, "config": _jsonable(dict(config))}


def format_cell(v) -> str:
    # repr gives the shortest round-tripping form and always uses '.'
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_csv(
    dest: str | Path | TextIO,
    header: Sequence[str],
    rows: Iterable[Sequence],
    command: str,
    config: Mapping,
) -> None:
    """Write ``rows`` under a two-line ``#`` preamble (version, resolved config)."""
    buf = io.StringIO()
    buf.write(f"# lzkzm {__version__} {command}\n")
    buf.write("# config: " + json.dumps(_jsonable(dict(config)), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        w.writerow([format_cell(c) for c in row])
    _emit(dest, buf.getvalue())


def write_json(dest: str | Path | TextIO, payload: Mapping, command: str, config: Mapping) -> None:
    doc = {"_meta": meta_block(command, config), **_jsonable(dict(payload))}
    _emit(dest, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _emit(dest, text: str) -> None:
    if dest is None or dest == "-":
        sys.stdout.write(text)
    elif hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text)


def read_csv(path: str | Path) -> tuple[list[str], list[dict[str, str]]]:
    """Return ``(comment lines, rows)``; ``#`` lines before the header are comments."""
    lines = Path(path).read_text().splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    return comments, list(csv.DictReader(body))


def sidecar(path: str | Path | None, suffix: str) -> Path | None:
    """``scan.csv`` -> ``scan.<suffix>.json``; ``None`` when writing to stdout."""
    if path is None or path == "-":
        return None
    p = Path(path)
    return p.with_name(f"{p.stem}.{suffix}.json")
