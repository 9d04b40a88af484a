"""Serialization helpers: 17-significant-digit JSON and CSV output."""
from __future__ import annotations

import json
import math

import numpy as np


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    nl = "\n" if indent else ""
    sep = "," + nl if indent else ", "
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(fmt_float(x))
        return fmt_float(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(str(k)) + ": " + _encode(v, indent, level + 1)
                 for k, v in obj.items()]
        return "{" + nl + sep.join(items) + nl + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[" + nl + sep.join(items) + nl + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits.

    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    return _encode(obj, indent, 0) + "\n"


def parse_float(v) -> float:
    if isinstance(v, str):
        return float(v)
    return float(v)


# --- instance files -------------------------------------------------------------

def read_json(path):
    from .errors import InputError
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def parse_space(data, path="space"):
    from .errors import InputError
    from .space import SpaceSpec
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected an object")
    if "dim" not in data:
        raise InputError(f"{path}.dim: missing")
    try:
        p = data.get("p", 2.0)
        p = float(p) if not isinstance(p, str) else float(p.replace("infinity", "inf"))
        return SpaceSpec(p, data["dim"], data.get("mode", "lp"))
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None
    except (TypeError, ValueError):
        raise InputError(f"{path}: malformed space") from None


def parse_sets(data, dim, path):
    from .errors import InputError
    from .sets import set_from_dict
    if not isinstance(data, list) or not data:
        raise InputError(f"{path}: expected a nonempty list of sets")
    return [set_from_dict(s, dim, f"{path}[{i}]") for i, s in enumerate(data)]


def parse_points(data, dim, path="points"):
    from .errors import InputError
    if not isinstance(data, list) or not data:
        raise InputError(f"{path}: expected a nonempty list of vectors")
    rows = []
    for i, v in enumerate(data):
        try:
            arr = np.asarray(v, dtype=float)
        except (TypeError, ValueError):
            raise InputError(f"{path}[{i}]: expected a list of numbers") from None
        if arr.shape != (dim,) or not np.all(np.isfinite(arr)):
            raise InputError(f"{path}[{i}]: expected {dim} finite numbers")
        rows.append(arr)
    return np.array(rows)


def parse_int(data, key, path=None, default=None):
    from .errors import InputError
    v = data.get(key, default)
    if v is None or isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise InputError(f"{path or key}: expected an integer")
    return int(v)


def load_instance(path):
    """Decode an instance file into a dict with ``space`` and the payload keys."""
    from .errors import InputError
    data = read_json(path)
    if not isinstance(data, dict):
        raise InputError("instance: expected an object")
    space = parse_space(data.get("space"), "space")
    out = {"space": space, "raw": data}
    if "sets" in data:
        out["sets"] = parse_sets(data["sets"], space.dim, "sets")
    if "families" in data:
        fams = data["families"]
        if not isinstance(fams, list) or not fams:
            raise InputError("families: expected a nonempty list of families")
        out["families"] = [parse_sets(f, space.dim, f"families[{c}]") for c, f in enumerate(fams)]
    if "points" in data:
        out["points"] = parse_points(data["points"], space.dim)
    for key in ("k", "K"):
        if key in data:
            out[key] = parse_int(data, key)
    return out
