"""JSON file formats for functions, curves and reports.

Formats::

    {"kind": "trigpoly", "a0": ..., "cos": [...], "sin": [...]}
    {"kind": "curve3", "x": <trigpoly>, "y": <trigpoly>, "z": <trigpoly>}
    {"kind": "sampled_c1", "period": L, "positions": [[x, y, z], ...],
     "velocities": [[...], ...]}

Floats are written with ``repr`` precision (shortest string that round-trips).
"""

import json
from pathlib import Path

import numpy as np

from .curves import curve_from_dict
from .errors import SkewLoopError
from .trigpoly import TrigPoly


class InputError(SkewLoopError, ValueError):
    """A file could not be read or does not hold the expected document."""


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if hasattr(o, "to_dict"):
        return o.to_dict()
    raise TypeError(f"cannot encode {type(o).__name__}")


def dumps(doc, indent=1):
    return json.dumps(doc, sort_keys=True, indent=indent, default=_default, allow_nan=True)


def save_json(doc, path):
    Path(path).write_text(dumps(doc) + "\n")


def load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_trigpoly(path):
    doc = load_json(path)
    if not isinstance(doc, dict) or doc.get("kind") != "trigpoly":
        raise InputError(f"{path}: expected a trigpoly document")
    try:
        return TrigPoly.from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: invalid trigpoly ({exc})") from exc


def load_curve(path):
    doc = load_json(path)
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a curve document")
    try:
        return curve_from_dict(doc)
    except SkewLoopError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: invalid curve ({exc})") from exc


def load_any(path):
    """A :class:`TrigPoly` or a curve, by the document's ``kind``."""
    doc = load_json(path)
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind == "trigpoly":
        return TrigPoly.from_dict(doc)
    if kind in ("curve3", "sampled_c1"):
        return curve_from_dict(doc)
    raise InputError(f"{path}: unknown document kind {kind!r}")
