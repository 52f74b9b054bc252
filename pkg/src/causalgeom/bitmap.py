"""Run-length encoded lattice bitmaps.

Format (JSON object, "schema": "causalgeom.bitmap/1"):
  window: {"T", "X", "h", "s"}
  shape:  lattice shape, axis 0 time
  first:  value of the first run (0 or 1)
  runs:   lengths of alternating runs over the C-order flattened mask
  sha256: hex digest of the packed mask bits, used as the region hash
"""
from __future__ import annotations

import hashlib
import json

import numpy as np

from .window import GridWindow

SCHEMA = "causalgeom.bitmap/1"


def region_hash(mask: np.ndarray) -> str:
    return hashlib.sha256(np.packbits(mask.ravel()).tobytes()).hexdigest()


def encode(mask: np.ndarray, G: GridWindow) -> dict:
    flat = np.asarray(mask, dtype=bool).ravel()
    if flat.size == 0:
        runs = []
    else:
        change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
        bounds = np.concatenate([[0], change, [flat.size]])
        runs = np.diff(bounds).tolist()
    return {"schema": SCHEMA, "window": G.to_dict(), "shape": list(mask.shape),
            "first": int(flat[0]) if flat.size else 0, "runs": runs,
            "sha256": region_hash(mask)}


def decode(doc: dict) -> tuple[np.ndarray, GridWindow]:
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported bitmap schema {doc.get('schema')!r}")
    w = doc["window"]
    G = GridWindow(w["T"], w["X"], w["h"], w["s"])
    vals = (np.arange(len(doc["runs"])) + doc["first"]) % 2
    flat = np.repeat(vals.astype(bool), doc["runs"])
    mask = flat.reshape(doc["shape"])
    if tuple(mask.shape) != G.shape:
        raise ValueError("bitmap shape does not match its window")
    if region_hash(mask) != doc["sha256"]:
        raise ValueError("bitmap hash mismatch")
    return mask, G


def dumps(mask: np.ndarray, G: GridWindow) -> str:
    return json.dumps(encode(mask, G), sort_keys=True)


def loads(text: str):
    return decode(json.loads(text))
