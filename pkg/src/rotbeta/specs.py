"""JSON map specifications and CSV emission."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .dynamics import RotBetaMap, reflection, rotation
from .geometry import LatticeDomain


def isometry_from_dict(spec, m):
    kind = spec.get("kind")
    if kind == "rotation":
        if m != 2:
            raise ValueError("rotation isometries need m = 2")
        return rotation(float(spec["angle"]))
    if kind == "reflection":
        if m != 2:
            raise ValueError("reflection isometries need m = 2")
        return reflection(float(spec["axisAngle"]))
    if kind == "matrix":
        return np.asarray(spec["rows"], dtype=float)
    if kind == "identity":
        return np.eye(m)
    raise ValueError(f"unknown isometry kind {kind!r}")


def map_from_dict(spec) -> RotBetaMap:
    """Build a map from
    ``{"beta": 2.5, "isometry": {...}, "domain": {"m": 2, "basis": [...], "xi": [...]}}``.
    """
    try:
        beta = float(spec["beta"])
        dom = LatticeDomain.from_dict(spec["domain"])
        iso = spec.get("isometry", {"kind": "identity"})
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed map spec: missing {exc}") from None
    return RotBetaMap(beta, isometry_from_dict(iso, dom.m), dom)


def load_map(path) -> RotBetaMap:
    with open(path) as fh:
        return map_from_dict(json.load(fh))


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def write_table(path, header, rows, fmt="csv"):
    if fmt == "json":
        rows = [dict(zip(header, _plain(r))) for r in rows]
        write_json(path, rows)
    else:
        write_csv(path, header, rows)


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_plain(obj), fh, indent=2)
        fh.write("\n")
