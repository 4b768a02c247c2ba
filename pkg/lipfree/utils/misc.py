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


import json
import hashlib
from pathlib import Path
from decimal import Decimal
from fractions import Fraction
from typing import Any, Iterable, Union


PAIR_SEPARATOR = "->"


def pair_key(u: str, v: str) -> str:
    """Key used for ordered pairs wherever a report maps pairs to values."""
    return f"{u}{PAIR_SEPARATOR}{v}"


def ordered_pairs(points: Iterable[str]):
    """All (u, v) with u != v, lexicographic in (u, v)."""
    ids = sorted(points)
    for u in ids:
        for v in ids:
            if u != v:
                yield u, v


def decimal_display(value: Fraction, places: int = 9) -> str:
    """
    Renders a rational as a fixed-point decimal string.

    Display only: predicates never look at this value.
    """
    exact = Decimal(value.numerator) / Decimal(value.denominator)
    return format(exact.quantize(Decimal(1).scaleb(-places)), "f")


def canonical_json(payload: Any) -> str:
    """Sorted keys, two-space indent, trailing newline. Byte-stable for equal payloads."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def sha256_of(path: Union[str, Path]) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
