"""File loading, flat config parsing and JSON output."""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .errors import DataError, MalformedRecord, SchainError
from .hin import Hin, iter_records, parse_hin

NODES = "nodes.tsv"
EDGES = "edges.tsv"
CONSTRAINTS = "constraints.tsv"
METAPATHS = "metapaths.txt"

CONFIG_KEYS = {
    "k": int,
    "alpha": float,
    "gamma": float,
    "epsilon": float,
    "max_iter": int,
    "seed": int,
    "tol_f": float,
    "kmeans_restarts": int,
    "max_dinkelbach": int,
}


class UsageError(SchainError):
    """Bad command-line usage or configuration (exit code 2)."""


def read_text(path: str | Path) -> str:
    path = Path(path)
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"missing input file: {path}") from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None


def load_hin_dir(directory: str | Path) -> Hin:
    """Read ``nodes.tsv``, ``edges.tsv`` and every ``attrs.<TYPE>.tsv`` from a directory."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"data directory not found: {directory}")
    nodes = read_text(directory / NODES)
    edges = read_text(directory / EDGES)
    attrs = {}
    for p in sorted(directory.glob("attrs.*.tsv")):
        attrs[p.name[len("attrs.") : -len(".tsv")]] = read_text(p)
    return parse_hin(nodes, edges, attrs)


def read_config(path: str | Path) -> dict[str, Any]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(read_text(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return out


def read_labels(path: str | Path) -> dict[str, str]:
    labels: dict[str, str] = {}
    for row, fields in iter_records(read_text(path)):
        if len(fields) != 2:
            raise MalformedRecord("label record needs <id>\\t<label>", row)
        if fields[0] in labels:
            raise DataError(f"duplicate label for {fields[0]!r}", row)
        labels[fields[0]] = fields[1]
    return labels


def _round(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """JSON with floats rounded to 12 significant digits."""
    return json.dumps(_round(obj), indent=2) + "\n"
