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


import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

import bittensor as bt

from lipfree.base.free import FreeElement, LipschitzFunction, combine, require_unit_norm
from lipfree.base.metric import FiniteMetricSpace
from lipfree.classify.slices import Slice, delta_scan, make_slices
from lipfree.errors import FormatError, PreconditionError
from lipfree.protocol import format_rational, parse_rational
from lipfree.spaces import GeneratorSpec
from lipfree.utils.misc import pair_key


CSV_COLUMNS = (
    "space_id",
    "step",
    "slice_id",
    "alpha",
    "min_length",
    "min_length_num",
    "min_length_den",
    "witness",
)


@dataclass(frozen=True)
class ProfileRow:
    space_id: str
    step: Fraction
    slice_id: str
    alpha: Fraction
    min_length: Fraction
    witness: Tuple[str, str]


def parse_terms(text: str) -> List[Tuple[str, str, Fraction]]:
    """``x1,y1,1/2;x2,y2,1/2`` -> molecule terms; a missing weight means 1."""
    terms = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) not in (2, 3):
            raise FormatError(f"bad molecule term {chunk!r}, expected x,y[,weight]")
        weight = parse_rational(parts[2]) if len(parts) == 3 else Fraction(1)
        terms.append((parts[0], parts[1], weight))
    if not terms:
        raise FormatError("element needs at least one molecule term")
    return terms


def _column_functional(space: FiniteMetricSpace, left, right) -> LipschitzFunction:
    if space.meta.get("kind") != "example46":
        raise PreconditionError("column slices are only defined on the two-column space")
    values = {}
    for p in space.points:
        a, b = space.label_of(p)
        values[p] = left(b) if a == 0 else right(b)
    return LipschitzFunction.normalized(space, values)


# f(0, b) = 1 - b, f(1, b) = b: every downward step in the left column and upward step
# in the right column pairs to exactly 1.
def balanced_functional(space: FiniteMetricSpace) -> LipschitzFunction:
    return _column_functional(space, lambda b: 1 - b, lambda b: b)


# Slope 1/2 inside the columns, so only cross-column molecules pair close to 1.
def half_slope_functional(space: FiniteMetricSpace) -> LipschitzFunction:
    return _column_functional(space, lambda b: 1 - b / 2, lambda b: b / 2)


NAMED_SLICES: Dict[str, Callable[[FiniteMetricSpace], LipschitzFunction]] = {
    "balanced": balanced_functional,
    "half-slope": half_slope_functional,
}


def _slices(space: FiniteMetricSpace, el: FreeElement, slice_name: str, alphas) -> List[Slice]:
    if slice_name == "family":
        return make_slices(space, el, alphas)
    try:
        builder = NAMED_SLICES[slice_name]
    except KeyError:
        raise FormatError(
            f"unknown slice {slice_name!r}, expected one of {sorted(NAMED_SLICES) + ['family']}"
        ) from None
    f = builder(space)
    return [Slice.checked(space, f, alpha, f"{slice_name}@{alpha}") for alpha in alphas]


def delta_profile(
    family: GeneratorSpec,
    param: str,
    values: Sequence[int],
    terms: Sequence[Tuple[str, str, Fraction]],
    slice_name: str,
    alphas: Sequence[Fraction],
    max_points: int = 64,
) -> List[ProfileRow]:
    """
    Shortest in-slice molecule for every member of a generator family and every alpha.

    ``family`` is rebuilt with ``param`` set to each of ``values``; the step column is the
    smallest positive distance of the member. The element given by ``terms`` must have
    norm 1 in every member.
    """
    if not alphas:
        raise PreconditionError("at least one alpha is required")
    if not values:
        raise PreconditionError(f"no values given for {param}")
    rows = []
    for value in values:
        spec = family.with_params(**{param: value})
        space = spec.build(max_points=max_points)
        el = combine(space, terms)
        require_unit_norm(space, el)
        for row in delta_scan(space, el, _slices(space, el, slice_name, alphas)):
            rows.append(
                ProfileRow(
                    str(spec),
                    space.min_positive_distance,
                    row.slice_id,
                    row.alpha,
                    row.min_length,
                    row.witness,
                )
            )
        bt.logging.debug(f"profiled {spec}")
    return rows


def profile_csv(rows: Sequence[ProfileRow], manifest: Dict) -> str:
    """CSV text whose first line is ``# manifest {json}``."""
    buf = io.StringIO()
    buf.write("# manifest " + json.dumps(manifest, sort_keys=True, ensure_ascii=False) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(
            [
                r.space_id,
                format_rational(r.step),
                r.slice_id,
                format_rational(r.alpha),
                format_rational(r.min_length),
                r.min_length.numerator,
                r.min_length.denominator,
                pair_key(*r.witness),
            ]
        )
    return buf.getvalue()
