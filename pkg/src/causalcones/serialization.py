"""Canonical JSON and CSV codecs for every CLI-facing value.

Serialization is canonical: dictionary keys sorted, reals at 17 significant
digits, no whitespace variation, trailing newline added by the writer.
Identical values therefore serialize to identical bytes, which is what the
determinism contract tests.
"""

import base64
import json

import numpy as np

from .causal_group import AffineMap
from .cones import ConvexCone
from .errors import InputError
from .events import EventSet, Relation


def _fmt_float(v):
    if not np.isfinite(v):
        raise InputError(f"cannot serialize non-finite value {v}")
    return format(float(v), ".17g")


def canonical_json(obj):
    """Deterministic JSON text (no trailing newline)."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return canonical_json(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_json(x) for x in obj) + "]"
    if isinstance(obj, dict):
        items = []
        for k in sorted(obj):
            if not isinstance(k, str):
                raise InputError(f"JSON object keys must be strings, got {k!r}")
            items.append(json.dumps(k) + ":" + canonical_json(obj[k]))
        return "{" + ",".join(items) + "}"
    raise InputError(f"cannot serialize {type(obj).__name__}")


def _require(obj, keys, what):
    if not isinstance(obj, dict):
        raise InputError(f"{what} must be a JSON object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise InputError(f"{what} is missing keys {missing}")


# vectors and matrices

def vector_from_obj(obj, what="vector"):
    try:
        v = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{what} must be an array of reals: {exc}") from exc
    if v.ndim != 1:
        raise InputError(f"{what} must be one-dimensional, got shape {v.shape}")
    return v


def matrix_to_obj(m):
    m = np.asarray(m, dtype=float)
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]),
            "data": [float(x) for x in m.ravel()]}


def matrix_from_obj(obj):
    _require(obj, ("rows", "cols", "data"), "matrix")
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = np.asarray(obj["data"], dtype=float)
    if data.shape != (rows * cols,):
        raise InputError(f"matrix data length {data.size} does not match {rows}x{cols}")
    return data.reshape(rows, cols)


# cones

def cone_to_obj(cone):
    out = {"dim": cone.dim,
           "generators": None if cone.generators is None else cone.generators.tolist()}
    if cone.normals is not None:
        out["normals"] = cone.normals.tolist()
    return out


def cone_from_obj(obj):
    _require(obj, ("dim", "generators"), "cone")
    gens = obj["generators"]
    normals = obj.get("normals")
    return ConvexCone(int(obj["dim"]),
                      generators=None if gens is None else np.asarray(gens, dtype=float),
                      normals=None if normals is None else np.asarray(normals, dtype=float))


# affine maps and decomposition reports

def affine_map_to_obj(f):
    return {"linear": matrix_to_obj(f.linear), "translation": f.translation.tolist()}


def affine_map_from_obj(obj):
    _require(obj, ("linear", "translation"), "affine map")
    return AffineMap(matrix_from_obj(obj["linear"]),
                     vector_from_obj(obj["translation"], "translation"))


def zeeman_to_obj(factors):
    return {"lambda": factors.lam,
            "lorentz": matrix_to_obj(factors.lorentz),
            "translation": factors.translation.tolist(),
            "orthochronous": True}


# event sets

def eventset_to_obj(e):
    lo, hi = e.box
    return {"q": e.q, "seed": e.seed, "box": [lo.tolist(), hi.tolist()],
            "periodic_time": e.periodic_time, "events": e.events.tolist()}


def eventset_from_obj(obj):
    _require(obj, ("q", "seed", "box", "periodic_time", "events"), "event set")
    box = obj["box"]
    if not (isinstance(box, list) and len(box) == 2):
        raise InputError("box must be a pair of corner vectors")
    return EventSet(int(obj["q"]), np.asarray(obj["events"], dtype=float),
                    (vector_from_obj(box[0], "box corner"), vector_from_obj(box[1], "box corner")),
                    periodic_time=obj["periodic_time"], seed=int(obj["seed"]))


# relations: packed base64 JSON or CSV of 0/1 rows

def relation_to_obj(rel):
    packed = np.packbits(rel.bits.reshape(-1))
    return {"size": rel.size,
            "encoding": "base64-packbits-rowmajor",
            "bits": base64.b64encode(packed.tobytes()).decode("ascii")}


def relation_from_obj(obj):
    _require(obj, ("size", "encoding", "bits"), "relation")
    if obj["encoding"] != "base64-packbits-rowmajor":
        raise InputError(f"unknown relation encoding {obj['encoding']!r}")
    n = int(obj["size"])
    try:
        packed = np.frombuffer(base64.b64decode(obj["bits"]), dtype=np.uint8)
    except Exception as exc:
        raise InputError(f"bad base64 relation payload: {exc}") from exc
    if packed.size * 8 < n * n:
        raise InputError("relation payload shorter than size*size bits")
    bits = np.unpackbits(packed, count=n * n).astype(bool).reshape(n, n)
    return Relation(bits)


def relation_to_csv(rel):
    return "\n".join(",".join("1" if b else "0" for b in row) for row in rel.bits)


def relation_from_csv(text):
    rows = [line.split(",") for line in text.strip().splitlines() if line.strip()]
    n = len(rows)
    bits = np.zeros((n, n), dtype=bool)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise InputError(f"CSV row {i} has {len(row)} cells, expected {n}")
        for j, cell in enumerate(row):
            if cell.strip() not in ("0", "1"):
                raise InputError(f"CSV cell ({i},{j}) must be 0 or 1, got {cell!r}")
            bits[i, j] = cell.strip() == "1"
    return Relation(bits)


# posets

def poset_to_obj(p):
    return {"size": p.size, "order": relation_to_obj(p.order)}


def poset_from_obj(obj):
    from .posets import make_poset

    _require(obj, ("size", "order"), "poset")
    rel = relation_from_obj(obj["order"])
    if rel.size != int(obj["size"]):
        raise InputError("poset size does not match its order relation")
    return make_poset(rel)


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc
