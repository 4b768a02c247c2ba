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
from typing import List, Tuple

import bittensor as bt

from lipfree.base.metric import FiniteMetricSpace, SegmentQuery, delta_segment, excess, segment
from lipfree.errors import PreconditionError


@dataclass(frozen=True)
class ShrinkStep:
    """
    One radius-shrinking step on (u, v).

    Attributes:
        u, v (str): the pair the step starts from.
        r, s (Fraction): radii with the delta-segment of (u, v) inside B(u, r) ∪ B(v, s).
        delta (Fraction): slack of that segment.
        r_prime (Fraction): smallest t with the segment inside B(u, t) ∪ B(v, s).
        s_prime (Fraction): smallest t with the gamma-segment of (x, v) inside B(u, r_prime) ∪ B(v, t).
        x, y (str): the new pair; x is u when r_prime is 0, y is v when s_prime is 0.
        delta_prime (Fraction): slack for the segment of (x, y).
    """

    u: str
    v: str
    r: Fraction
    s: Fraction
    delta: Fraction
    r_prime: Fraction
    s_prime: Fraction
    x: str
    y: str
    delta_prime: Fraction


def _cover_radius(
    space: FiniteMetricSpace, centre: str, other: str, other_radius: Fraction, points: List[str]
) -> Tuple[Fraction, str]:
    """Smallest t with ``points`` inside B(centre, t) ∪ B(other, other_radius), and the first point at distance t."""
    best = (Fraction(0), centre)
    for p in points:
        if space.d(other, p) > other_radius and space.d(centre, p) > best[0]:
            best = (space.d(centre, p), p)
    return best


def shrink_step(space: FiniteMetricSpace, u: str, v: str, r, s, delta) -> ShrinkStep:
    """
    Moves u to the farthest point x of the delta-segment that B(v, s) misses, then v
    to the farthest point y of a thinner segment of (x, v) that B(u, r') misses.

    The result keeps d(u, x) + d(x, y) + d(y, v) + delta' < d(u, v) + delta, and every
    point of the delta'-segment of (x, y) lies within delta of x or of y.

    Raises:
        PreconditionError: a point of the delta-segment lies outside B(u, r) ∪ B(v, s).
    """
    r, s, delta = Fraction(r), Fraction(s), Fraction(delta)
    if delta <= 0:
        raise PreconditionError(f"delta must be positive, got {delta}")
    uv = delta_segment(space, SegmentQuery(u, v, delta))
    for p in uv:
        if space.d(u, p) > r and space.d(v, p) > s:
            raise PreconditionError(f"segment point {p!r} lies outside B(u, r) ∪ B(v, s)")

    r_prime, x = _cover_radius(space, u, v, s, uv)
    gamma = (delta - excess(space, u, v, x)) / 2
    xv = delta_segment(space, SegmentQuery(x, v, gamma))
    s_prime, y = _cover_radius(space, v, u, r_prime, xv)

    slack = space.d(u, v) + delta - space.d(u, x) - space.d(v, y) - space.d(x, y)
    delta_prime = min(gamma - excess(space, x, v, y), slack) / 2
    return ShrinkStep(u, v, r, s, delta, r_prime, s_prime, x, y, delta_prime)


def descent_path(space: FiniteMetricSpace, u: str, v: str, r, s, delta) -> Tuple[ShrinkStep, ...]:
    """
    Shrink steps from (u, v) down to a pair whose relaxed segment holds only its endpoints.

    The first step uses min(delta, (d(u, v) - r - s) / 2). Each later step starts from the
    previous (x, y) with both radii equal to the previous slack and a slack at most a sixth
    of it, so the radii fall below the smallest distance after finitely many steps.
    Empty when m_uv is already denting.

    Raises:
        PreconditionError: r + s >= d(u, v), or a point of the delta-segment lies
            outside both balls (the point is named).
    """
    r, s, delta = Fraction(r), Fraction(s), Fraction(delta)
    if u == v:
        raise PreconditionError("descent requires distinct endpoints")
    if r < 0 or s < 0 or delta <= 0:
        raise PreconditionError("radii must be nonnegative and delta positive")
    duv = space.d(u, v)
    if r + s >= duv:
        raise PreconditionError(f"r + s = {r + s} must be below d(u, v) = {duv}")
    for p in delta_segment(space, SegmentQuery(u, v, delta)):
        if space.d(u, p) > r and space.d(v, p) > s:
            raise PreconditionError(f"segment point {p!r} lies outside B(u, r) ∪ B(v, s)")
    if len(segment(space, u, v)) == 2:
        return ()

    steps = []
    a, b, ra, sb = u, v, r, s
    delta = min(delta, (duv - r - s) / 2)
    while len(delta_segment(space, SegmentQuery(a, b, delta))) > 2:
        step = shrink_step(space, a, b, ra, sb, delta)
        steps.append(step)
        a, b = step.x, step.y
        ra = sb = delta
        delta = min(step.delta_prime, delta / 6)
    return tuple(steps)


def denting_descent(space: FiniteMetricSpace, u: str, v: str, r, s, delta) -> Tuple[str, str]:
    """
    Finds a denting molecule m_xy with x in B(u, r) and y in B(v, s) by iterating
    :func:`shrink_step` until the relaxed segment of the pair is trivial.
    """
    steps = descent_path(space, u, v, r, s, delta)
    if not steps:
        return u, v
    x, y = steps[-1].x, steps[-1].y
    if len(segment(space, x, y)) != 2:
        raise RuntimeError(f"descent from ({u}, {v}) stopped at ({x}, {y}), which is not denting")
    bt.logging.debug(f"descent from ({u}, {v}) reached ({x}, {y}) after {len(steps)} steps")
    return x, y
