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


from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Set, Tuple

import bittensor as bt

from lipfree.base.free import molecule
from lipfree.base.metric import FiniteMetricSpace, SegmentQuery, delta_segment
from lipfree.classify.daugavet import denting_set, is_daugavet
from lipfree.protocol import format_rational
from lipfree.spaces import gen_example32
from lipfree.utils.misc import decimal_display, pair_key


Pair = Tuple[str, str]


@dataclass(frozen=True)
class ZWitness:
    """The midpoint z = (1/2, 1/2^(n+2)) of the comb, checked against [x, y] with slack 1/2^n."""

    n: int
    z: str
    d_xz: Fraction
    d_yz: Fraction
    in_delta_segment: bool
    outside_half_balls: bool

    @property
    def ok(self) -> bool:
        expected = Fraction(1, 2) + Fraction(1, 2 ** (self.n + 2))
        return (
            self.d_xz == expected
            and self.d_yz == expected
            and self.in_delta_segment
            and self.outside_half_balls
        )


def predicted_denting_set(depth: int) -> Set[frozenset]:
    """
    Denting pairs of the depth-N comb: neighbours on each level, neighbours along the two
    outer columns (the bottom corners included) and the bottom pair (x, y).
    """
    pairs = {frozenset(("x", "y"))}
    for n in range(1, depth + 1):
        top = 2**n
        pairs.update(frozenset((f"s{n}_{k}", f"s{n}_{k + 1}")) for k in range(top))
        if n < depth:
            pairs.add(frozenset((f"s{n}_0", f"s{n + 1}_0")))
            pairs.add(frozenset((f"s{n}_{top}", f"s{n + 1}_{2 * top}")))
    pairs.add(frozenset(("x", f"s{depth}_0")))
    pairs.add(frozenset(("y", f"s{depth}_{2**depth}")))
    return pairs


def z_witnesses(space: FiniteMetricSpace, depth: int) -> List[ZWitness]:
    rows = []
    for n in range(1, depth - 1):
        z = space.find_label(Fraction(1, 2), Fraction(1, 2 ** (n + 2)))
        seg = delta_segment(space, SegmentQuery("x", "y", Fraction(1, 2**n)))
        half = Fraction(1, 2)
        rows.append(
            ZWitness(
                n=n,
                z=z,
                d_xz=space.d("x", z),
                d_yz=space.d("y", z),
                in_delta_segment=z in seg,
                outside_half_balls=space.d("x", z) > half and space.d("y", z) > half,
            )
        )
    return rows


def example32_report(depth: int) -> Tuple[Dict[str, Any], bool]:
    """
    Runs the comb pipeline for one depth.

    Returns the report body and whether every check held: the denting set matches
    :func:`predicted_denting_set`, every z-witness row is exact, and m_xy is at distance
    2 from every denting molecule except m_xy itself (the truncation makes m_xy denting).
    """
    space = gen_example32(depth)
    dent = denting_set(space)
    matches = {frozenset(p) for p in dent} == predicted_denting_set(depth)

    el = molecule(space, "x", "y")
    verdict = is_daugavet(space, el, exclude=[("x", "y"), ("y", "x")])
    below_two = {pair_key(*p): d for p, d in verdict.distances.items() if d < 2}
    witnesses = z_witnesses(space, depth)

    ok = matches and verdict.is_daugavet and all(w.ok for w in witnesses)
    bt.logging.info(
        f"example32 depth {depth}: {len(dent)} denting pairs, classification "
        f"{'matches' if matches else 'differs'}, fails only by excluded={verdict.fails_only_by_excluded}"
    )
    body = {
        "depth": depth,
        "points": space.size,
        "denting_set": [pair_key(u, v) for u, v in dent],
        "denting_set_matches_prediction": matches,
        "distances_to_m_xy": {
            pair_key(*p): format_rational(d) for p, d in sorted(verdict.distances.items())
        },
        "z_witnesses": [
            {
                "n": w.n,
                "z": w.z,
                "d_xz": format_rational(w.d_xz),
                "d_yz": format_rational(w.d_yz),
                "in_delta_segment": w.in_delta_segment,
                "outside_half_balls": w.outside_half_balls,
                "ok": w.ok,
            }
            for w in witnesses
        ],
        "verdict": {
            "is_daugavet_outside_excluded": verdict.is_daugavet,
            "excluded": [pair_key(*p) for p in verdict.excluded],
            "fails_only_by_excluded": verdict.fails_only_by_excluded,
            "below_two": {k: format_rational(v) for k, v in below_two.items()},
        },
        "decimal_display": {k: decimal_display(v) for k, v in below_two.items()},
    }
    return body, ok
