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


from dataclasses import dataclass, field, replace
from functools import lru_cache
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import bittensor as bt

from lipfree.base.free import (
    FreeElement,
    as_molecule,
    molecule,
    norm,
    require_unit_norm,
)
from lipfree.base.metric import (
    FiniteMetricSpace,
    SegmentQuery,
    delta_segment,
    min_enclosing_radii,
    segment,
)
from lipfree.classify.slices import Slice
from lipfree.errors import PreconditionError
from lipfree.molecules.calculus import pair_distance
from lipfree.utils.misc import ordered_pairs


Pair = Tuple[str, str]


def distance_to_molecule(space: FiniteMetricSpace, el: FreeElement, u: str, v: str) -> Fraction:
    """||el - m_uv||; closed form when ``el`` is a molecule, transport solver otherwise."""
    mol = as_molecule(space, el)
    if mol is not None:
        return pair_distance(space, mol[0], mol[1], u, v)
    return norm(space, el - molecule(space, u, v)).value


def is_denting(space: FiniteMetricSpace, u: str, v: str) -> bool:
    """m_uv is a denting point iff the segment of (u, v) is just {u, v}."""
    return len(segment(space, u, v)) == 2


def denting_set(space: FiniteMetricSpace) -> List[Pair]:
    """Unordered denting pairs as (u, v) with u < v, sorted."""
    pts = sorted(space.points)
    return [
        (u, v)
        for i, u in enumerate(pts)
        for v in pts[i + 1 :]
        if is_denting(space, u, v)
    ]


@dataclass(frozen=True)
class DaugavetVerdict:
    """
    Distances from an element to every denting molecule.

    Attributes:
        is_daugavet (bool): every non-excluded denting molecule is at distance exactly 2.
        offending (tuple | None): first non-excluded (u, v, distance) below 2, lexicographic.
        denting_set (tuple): denting molecules, both orientations, sorted.
        distances (dict): (u, v) -> ||el - m_uv|| over ``denting_set``.
        excluded (tuple): pairs left out of the verdict.
        fails_only_by_excluded (bool): some excluded pair is below 2 and nothing else is.
    """

    is_daugavet: bool
    offending: Optional[Tuple[str, str, Fraction]]
    denting_set: Tuple[Pair, ...]
    distances: Dict[Pair, Fraction]
    excluded: Tuple[Pair, ...] = ()
    fails_only_by_excluded: bool = False


def is_daugavet(
    space: FiniteMetricSpace, el: FreeElement, exclude: Iterable[Pair] = ()
) -> DaugavetVerdict:
    """
    Finite-dimensional Daugavet test: every slice of the ball contains a denting point,
    so el is a Daugavet point iff ||el - m|| = 2 for every denting molecule m.

    Args:
        space (FiniteMetricSpace): the metric.
        el (FreeElement): a unit-norm element.
        exclude (Iterable[Pair]): oriented pairs to leave out of the verdict, e.g. the
            element itself when a truncation makes it denting.
    """
    require_unit_norm(space, el)
    excluded = tuple(sorted(set(tuple(p) for p in exclude)))
    oriented = sorted(
        pair for u, v in denting_set(space) for pair in ((u, v), (v, u))
    )
    distances = {(u, v): distance_to_molecule(space, el, u, v) for u, v in oriented}

    offending = None
    excluded_failure = False
    for pair in oriented:
        if distances[pair] >= 2:
            continue
        if pair in excluded:
            excluded_failure = True
        elif offending is None:
            offending = (pair[0], pair[1], distances[pair])
    bt.logging.debug(
        f"Daugavet test over {len(oriented)} denting molecules: offending={offending}"
    )
    return DaugavetVerdict(
        is_daugavet=offending is None,
        offending=offending,
        denting_set=tuple(oriented),
        distances=distances,
        excluded=excluded,
        fails_only_by_excluded=offending is None and excluded_failure,
    )


@dataclass(frozen=True)
class ConditionViolation:
    u: str
    v: str
    radii: Fraction
    bound: Fraction
    distance: Fraction


@dataclass(frozen=True)
class ConditionIIIReport:
    """
    Attributes:
        violations (tuple): pairs with ||el - m_uv|| < 2 - 2 (r+s)_min.
        checked (int): pairs with a positive bound.
        method (str): ``closed-form`` for molecules, ``solver`` otherwise.
    """

    violations: Tuple[ConditionViolation, ...]
    checked: int
    method: str

    @property
    def ok(self) -> bool:
        return not self.violations


def condition_iii_check(space: FiniteMetricSpace, el: FreeElement) -> ConditionIIIReport:
    """
    Checks ||el - m_uv|| >= 2 - 2 (r + s)_min for every ordered pair, with (r + s)_min
    the tightest ball split of the segment of (u, v) from :func:`min_enclosing_radii`.

    Pairs whose bound is not positive are vacuous and skipped.
    """
    require_unit_norm(space, el)
    method = "closed-form" if as_molecule(space, el) is not None else "solver"
    radii_cache: Dict[Pair, Fraction] = {}
    violations, checked = [], 0
    for u, v in ordered_pairs(space.points):
        key = (min(u, v), max(u, v))
        if key not in radii_cache:
            radii_cache[key] = min_enclosing_radii(space, *key).total
        radii = radii_cache[key]
        bound = 2 - 2 * radii
        if bound <= 0:
            continue
        checked += 1
        distance = distance_to_molecule(space, el, u, v)
        if distance < bound:
            violations.append(ConditionViolation(u, v, radii, bound, distance))
    return ConditionIIIReport(tuple(violations), checked, method)


@dataclass(frozen=True)
class WitnessReport:
    """
    Outcome of the slice witness search.

    Attributes:
        found (bool): ``u, v`` is in the slice and ||el - m_uv|| >= 2 - eps.
        u, v (str): the witness, or the terminal pair when nothing was found.
        distance (Fraction): ||el - m_uv||.
        length (Fraction): d(u, v).
        reason (str): ``far-witness``, ``no-splitting-point`` or ``iteration-bound``.
        path (tuple): every pair visited, starting pair first.
        steps_allowed (int): the iteration bound n.
        delta (Fraction): the segment slack used for splitting.
        start_index (int): position of the starting pair in the start order; 0 when
            the first start succeeded.
        starts_tried (int): walks run before the search returned.
    """

    found: bool
    u: str
    v: str
    distance: Fraction
    length: Fraction
    reason: str
    path: Tuple[Pair, ...] = field(default_factory=tuple)
    steps_allowed: int = 0
    delta: Fraction = Fraction(0)
    start_index: int = 0
    starts_tried: int = 1


@lru_cache(maxsize=None)
def _search_parameters(d0: Fraction, floor: Fraction, eps: Fraction, ratio: Fraction):
    """Smallest n with (1 - eps/4 + delta)^n d0 < floor, and delta with (1 + delta)^n < ratio."""
    delta = eps / 8
    while True:
        q = 1 - eps / 4 + delta
        n, reach = 0, d0
        while reach >= floor:
            reach *= q
            n += 1
        if (1 + delta) ** n < ratio:
            return n, delta
        delta /= 2


def _walk(space, el, f, alpha, eps, u, v) -> WitnessReport:
    d0 = space.d(u, v)
    n, delta = _search_parameters(
        d0, space.min_positive_distance, eps, (f(u) - f(v)) / ((1 - alpha) * d0)
    )
    path = [(u, v)]
    reason = "iteration-bound"
    for k in range(n + 1):
        distance = distance_to_molecule(space, el, u, v)
        if distance >= 2 - eps:
            return WitnessReport(
                True, u, v, distance, space.d(u, v), "far-witness", tuple(path), n, delta
            )
        if k == n:
            break
        duv = space.d(u, v)
        radius = eps / 4 * duv
        splitting = [
            p
            for p in delta_segment(space, SegmentQuery(u, v, delta * duv))
            if space.d(u, p) > radius and space.d(v, p) > radius
        ]
        level = (1 - alpha) * (1 + delta) ** (n - k - 1)
        chosen = None
        for p in splitting:
            if f(u) - f(p) > level * space.d(u, p):
                chosen = (u, p)
                break
            if f(p) - f(v) > level * space.d(p, v):
                chosen = (p, v)
                break
        if chosen is None:
            reason = "no-splitting-point"
            break
        u, v = chosen
        path.append(chosen)
    return WitnessReport(
        False,
        u,
        v,
        distance_to_molecule(space, el, u, v),
        space.d(u, v),
        reason,
        tuple(path),
        n,
        delta,
    )


def daugavet_witness_search(
    space: FiniteMetricSpace,
    el: FreeElement,
    slc: Slice,
    eps,
    max_starts: Optional[int] = None,
    start: Optional[Pair] = None,
) -> WitnessReport:
    """
    Looks for a molecule in ``slc`` at distance >= 2 - eps from ``el`` by repeatedly
    splitting an in-slice pair at a point of its delta-segment that is far from both ends.

    Each step keeps f(u) - f(v) > (1 - alpha)(1 + delta)^(n-k) d(u, v), so every visited
    pair stays in the slice, while lengths shrink geometrically; n and delta come from eps
    and the smallest positive distance of the space.

    Walks start from in-slice molecules by decreasing pairing (ties lexicographic). A walk
    that gets stuck moves on to the next start, up to ``max_starts`` of them (all by
    default). When every walk fails, the report of the first one is returned. ``start``
    runs a single walk from the given pair instead.
    """
    eps = Fraction(eps)
    if not 0 < eps < 2:
        raise PreconditionError(f"eps must lie in (0, 2), got {eps}")
    if not slc.contains(el):
        raise PreconditionError("slice does not contain the element")
    f, alpha = slc.f, slc.alpha

    if start is not None:
        u, v = start
        if u == v or not slc.contains_molecule(space, u, v):
            raise PreconditionError(f"start ({u}, {v}) is not a molecule of the slice")
        return _walk(space, el, f, alpha, eps, u, v)

    starts = sorted(
        (-(f(u) - f(v)) / space.d(u, v), u, v)
        for u, v in ordered_pairs(space.points)
        if slc.contains_molecule(space, u, v)
    )
    if not starts:
        raise PreconditionError("slice contains no molecule")
    if max_starts is not None:
        starts = starts[: max(1, max_starts)]

    first = None
    for i, (_, u, v) in enumerate(starts):
        report = _walk(space, el, f, alpha, eps, u, v)
        if report.found:
            bt.logging.debug(
                f"witness ({report.u}, {report.v}) found from start {i} after {len(report.path) - 1} splits"
            )
            return replace(report, start_index=i, starts_tried=i + 1)
        if first is None:
            first = report
    bt.logging.debug(f"witness search stopped at ({first.u}, {first.v}): {first.reason}")
    return replace(first, starts_tried=len(starts))


def max_distance_in_slice(
    space: FiniteMetricSpace, el: FreeElement, slc: Slice
) -> Optional[Tuple[Fraction, Pair]]:
    """Largest ||el - m_uv|| over molecules in the slice, with the first pair attaining it."""
    best = None
    for u, v in ordered_pairs(space.points):
        if not slc.contains_molecule(space, u, v):
            continue
        distance = distance_to_molecule(space, el, u, v)
        if best is None or distance > best[0]:
            best = (distance, (u, v))
    return best
