# The MIT License (MIT)
# Copyright © 2024 lipfree developers

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.


# Wire formats. Every rational crosses the wire as a "p/q" string; readers also accept
# bare integer strings. Floats are refused everywhere.
#
#   space:    {"points": [{"id": "p0", "label": ["0/1", "1/2"]}, ...], "base": "p0",
#              "dist": [["0/1", "1/2", ...], ...], "meta": {...}}
#   element:  {"masses": {"p3": "1/2", ...}}  or  {"molecules": [{"x": ..., "y": ..., "w": ...}]}
#   function: {"values": {"p0": "0/1", ...}}

import dataclasses
import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Mapping, Union

from lipfree.base.free import FreeElement, LipschitzFunction, MoleculeTerm, NormCertificate, combine
from lipfree.base.metric import FiniteMetricSpace
from lipfree.errors import FormatError
from lipfree.utils.misc import pair_key


_RATIONAL = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(value) -> Fraction:
    """Reads "p/q" or an integer string (ints are accepted too)."""
    if isinstance(value, bool) or isinstance(value, float):
        raise FormatError(f"expected a rational string, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if not isinstance(value, str):
        raise FormatError(f"expected a rational string, got {value!r}")
    match = _RATIONAL.match(value)
    if not match:
        raise FormatError(f"not a rational: {value!r}")
    num, den = match.group(1), match.group(2) or "1"
    if int(den) == 0:
        raise FormatError(f"zero denominator in {value!r}")
    return Fraction(int(num), int(den))


def format_rational(value) -> str:
    """Canonical "p/q" with q > 0 and the fraction in lowest terms, so 2 -> "2/1"."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def _require(doc: Mapping, key: str, what: str):
    if not isinstance(doc, Mapping) or key not in doc:
        raise FormatError(f"{what} is missing {key!r}")
    return doc[key]


def space_from_dict(doc: Mapping) -> FiniteMetricSpace:
    points = _require(doc, "points", "space")
    base = _require(doc, "base", "space")
    dist = _require(doc, "dist", "space")
    if not isinstance(points, list) or not isinstance(dist, list):
        raise FormatError("space points and dist must be lists")
    ids, labels = [], {}
    for entry in points:
        if isinstance(entry, str):
            ids.append(entry)
            continue
        pid = str(_require(entry, "id", "point"))
        ids.append(pid)
        if entry.get("label") is not None:
            labels[pid] = tuple(parse_rational(c) for c in entry["label"])
    if not all(isinstance(row, list) for row in dist):
        raise FormatError("space dist must be a list of rows")
    matrix = [[parse_rational(x) for x in row] for row in dist]
    return FiniteMetricSpace(ids, matrix, str(base), labels=labels, meta=doc.get("meta"))


def space_to_dict(space: FiniteMetricSpace) -> Dict[str, Any]:
    points = []
    for p in space.points:
        entry: Dict[str, Any] = {"id": p}
        label = space.label_of(p)
        if label is not None:
            entry["label"] = [format_rational(c) for c in label]
        points.append(entry)
    doc = {
        "points": points,
        "base": space.base,
        "dist": [[format_rational(x) for x in row] for row in space.matrix()],
    }
    if space.meta:
        doc["meta"] = to_wire(space.meta)
    return doc


def element_from_dict(space: FiniteMetricSpace, doc: Mapping) -> FreeElement:
    if isinstance(doc, Mapping) and "molecules" in doc:
        terms = []
        for m in doc["molecules"]:
            x, y = str(_require(m, "x", "molecule")), str(_require(m, "y", "molecule"))
            space.index(x), space.index(y)
            terms.append(MoleculeTerm(x, y, parse_rational(m.get("w", "1"))))
        return combine(space, terms)
    masses = _require(doc, "masses", "element")
    if not isinstance(masses, Mapping):
        raise FormatError("element masses must be an object")
    for p in masses:
        space.index(p)
    return FreeElement({p: parse_rational(m) for p, m in masses.items()})


def element_to_dict(el: FreeElement) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"masses": {p: format_rational(m) for p, m in el.masses.items()}}
    if el.presentation is not None:
        doc["molecules"] = [
            {"x": t.x, "y": t.y, "w": format_rational(t.weight)} for t in el.presentation
        ]
    return doc


def function_from_dict(space: FiniteMetricSpace, doc: Mapping) -> LipschitzFunction:
    values = _require(doc, "values", "function")
    if not isinstance(values, Mapping):
        raise FormatError("function values must be an object")
    return LipschitzFunction.normalized(space, {p: parse_rational(v) for p, v in values.items()})


def function_to_dict(f: LipschitzFunction) -> Dict[str, Any]:
    return {"values": {p: format_rational(v) for p, v in f.values.items()}}


def certificate_to_dict(cert: NormCertificate) -> Dict[str, Any]:
    return {
        "value": format_rational(cert.value),
        "flow": [{"from": p, "to": q, "amount": format_rational(a)} for p, q, a in cert.flow],
        "potential": function_to_dict(cert.potential),
    }


def _wire_key(key) -> str:
    if isinstance(key, tuple) and len(key) == 2:
        return pair_key(*key)
    return str(key)


def to_wire(obj) -> Any:
    """
    Converts report objects to JSON-ready values.

    Rationals become "p/q" strings, tuples become lists, dataclasses and named tuples
    become objects keyed by field name.
    """
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, float):
        raise FormatError(f"refusing to serialize float {obj!r}")
    if isinstance(obj, FreeElement):
        return element_to_dict(obj)
    if isinstance(obj, LipschitzFunction):
        return function_to_dict(obj)
    if isinstance(obj, NormCertificate):
        return certificate_to_dict(obj)
    if isinstance(obj, FiniteMetricSpace):
        return space_to_dict(obj)
    if dataclasses.is_dataclass(obj):
        return {f.name: to_wire(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if hasattr(obj, "_asdict"):
        return {k: to_wire(v) for k, v in obj._asdict().items()}
    if isinstance(obj, Mapping):
        return {_wire_key(k): to_wire(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_wire(v) for v in obj]
        return sorted(items, key=json.dumps) if isinstance(obj, (set, frozenset)) else items
    raise FormatError(f"cannot serialize {type(obj).__name__}")


def _read_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from e
    except OSError as e:
        raise FormatError(f"{path}: {e.strerror}") from e


def load_space(path: Union[str, Path]) -> FiniteMetricSpace:
    return space_from_dict(_read_json(path))


def load_element(space: FiniteMetricSpace, path: Union[str, Path]) -> FreeElement:
    return element_from_dict(space, _read_json(path))


def load_function(space: FiniteMetricSpace, path: Union[str, Path]) -> LipschitzFunction:
    return function_from_dict(space, _read_json(path))
