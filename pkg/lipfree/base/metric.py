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


from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import bittensor as bt

from lipfree.errors import FormatError, MetricViolation, PreconditionError


Label = Tuple[Fraction, Fraction]


def _exact(value) -> Fraction:
    if isinstance(value, float):
        raise FormatError(f"floating point distance {value!r}; use exact rationals")
    try:
        return Fraction(value)
    except (TypeError, ValueError) as e:
        raise FormatError(f"not a rational: {value!r}") from e


class FiniteMetricSpace:
    """
    A finite point set with an exact rational distance matrix and a base point.

    Point ids are opaque strings. Coordinate labels are metadata for reports and
    generators; they never enter a distance computation.

    The constructor only checks the shape of its input. Use :func:`validate` (or
    :meth:`check`) for the metric axioms.
    """

    def __init__(
        self,
        points: Sequence[str],
        dist: Sequence[Sequence],
        base: str,
        labels: Optional[Mapping[str, Sequence]] = None,
        meta: Optional[Mapping] = None,
    ):
        ids = tuple(str(p) for p in points)
        if not ids:
            raise FormatError("a metric space needs at least one point")
        if len(set(ids)) != len(ids):
            raise FormatError("duplicate point ids")
        if base not in ids:
            raise FormatError(f"base point {base!r} is not one of the declared points")
        if len(dist) != len(ids) or any(len(row) != len(ids) for row in dist):
            raise FormatError("distance matrix must be square over the declared points")

        self._points = ids
        self._index = {p: i for i, p in enumerate(ids)}
        self._dist = tuple(tuple(_exact(x) for x in row) for row in dist)
        self._base = base
        self._labels: Dict[str, Label] = {
            str(p): tuple(_exact(c) for c in label) for p, label in (labels or {}).items()
        }
        unknown = set(self._labels) - set(ids)
        if unknown:
            raise FormatError(f"labels for unknown points: {sorted(unknown)}")
        self._meta = dict(meta or {})

    @property
    def points(self) -> Tuple[str, ...]:
        return self._points

    @property
    def base(self) -> str:
        return self._base

    @property
    def labels(self) -> Dict[str, Label]:
        return dict(self._labels)

    @property
    def meta(self) -> Dict:
        return dict(self._meta)

    @property
    def size(self) -> int:
        return len(self._points)

    def __len__(self) -> int:
        return len(self._points)

    def __contains__(self, p) -> bool:
        return p in self._index

    def __repr__(self) -> str:
        kind = self._meta.get("kind", "custom")
        return f"FiniteMetricSpace({kind}, {self.size} points, base={self._base!r})"

    def index(self, p: str) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise FormatError(f"unknown point id {p!r}") from None

    def d(self, p: str, q: str) -> Fraction:
        try:
            return self._dist[self._index[p]][self._index[q]]
        except KeyError:
            raise FormatError(f"unknown point id in ({p!r}, {q!r})") from None

    def matrix(self) -> Tuple[Tuple[Fraction, ...], ...]:
        return self._dist

    def label_of(self, p: str) -> Optional[Label]:
        return self._labels.get(p)

    def find_label(self, *coords) -> str:
        """Point id carrying the given coordinate label."""
        wanted = tuple(Fraction(c) for c in coords)
        for p in self._points:
            if self._labels.get(p) == wanted:
                return p
        raise FormatError(f"no point labelled {coords}")

    @cached_property
    def min_positive_distance(self) -> Optional[Fraction]:
        positive = [x for row in self._dist for x in row if x > 0]
        return min(positive) if positive else None

    def ball(self, center: str, radius: Fraction) -> List[str]:
        """Closed ball, as sorted ids."""
        return sorted(p for p in self._points if self.d(center, p) <= radius)

    def check(self) -> "FiniteMetricSpace":
        report = validate(self)
        if not report.ok:
            raise MetricViolation(report.axiom, report.witnesses, report.message)
        return self


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    axiom: Optional[str] = None
    witnesses: Tuple[str, ...] = ()
    message: str = ""


@dataclass(frozen=True)
class SegmentQuery:
    """The pair (u, v) and slack delta of a delta-segment."""

    u: str
    v: str
    delta: Fraction = Fraction(0)

    def __post_init__(self):
        if self.u == self.v:
            raise PreconditionError("segment requires distinct endpoints")
        delta = _exact(self.delta)
        if delta < 0:
            raise PreconditionError(f"delta must be nonnegative, got {delta}")
        object.__setattr__(self, "delta", delta)


@dataclass(frozen=True)
class EnclosingRadii:
    """Optimal split of a segment's interior between a ball around u and a ball around v.

    ``r`` and ``s`` are normalized by d(u, v).
    """

    r: Fraction
    s: Fraction
    u_part: Tuple[str, ...] = field(default_factory=tuple)
    v_part: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def total(self) -> Fraction:
        return self.r + self.s


def validate(space: FiniteMetricSpace) -> ValidationReport:
    """
    Checks the metric axioms and reports the first violation found.

    Pairs and triples are scanned in declared point order, so the reported
    witnesses are deterministic.

    Args:
        space (FiniteMetricSpace): the space to check.

    Returns:
        ValidationReport: ``ok`` is True iff every axiom holds. On failure ``axiom``
        names the broken axiom and ``witnesses`` holds the offending ids; for the
        triangle inequality the witnesses are (p, q, r) with d(p, q) > d(p, r) + d(r, q).
    """
    pts = space.points
    m = space.matrix()
    n = len(pts)
    for i in range(n):
        if m[i][i] != 0:
            return ValidationReport(
                False, "zero-diagonal", (pts[i],), f"d({pts[i]},{pts[i]}) = {m[i][i]} != 0"
            )
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if m[i][j] <= 0:
                return ValidationReport(
                    False,
                    "positivity",
                    (pts[i], pts[j]),
                    f"d({pts[i]},{pts[j]}) = {m[i][j]} is not positive",
                )
            if m[i][j] != m[j][i]:
                return ValidationReport(
                    False,
                    "symmetry",
                    (pts[i], pts[j]),
                    f"d({pts[i]},{pts[j]}) = {m[i][j]} but d({pts[j]},{pts[i]}) = {m[j][i]}",
                )
    for i in range(n):
        row_i = m[i]
        for j in range(n):
            if i == j:
                continue
            for k in range(n):
                if row_i[j] > row_i[k] + m[k][j]:
                    return ValidationReport(
                        False,
                        "triangle",
                        (pts[i], pts[j], pts[k]),
                        f"d({pts[i]},{pts[j]}) = {row_i[j]} > "
                        f"d({pts[i]},{pts[k]}) + d({pts[k]},{pts[j]}) = {row_i[k] + m[k][j]}",
                    )
    bt.logging.debug(f"Validated {space!r}")
    return ValidationReport(True)


def _endpoints(u: str, v: str):
    if u == v:
        raise PreconditionError("segment requires distinct endpoints")


def excess(space: FiniteMetricSpace, u: str, v: str, p: str) -> Fraction:
    """d(u,p) + d(v,p) - d(u,v); zero exactly on the segment."""
    return space.d(u, p) + space.d(v, p) - space.d(u, v)


def segment(space: FiniteMetricSpace, u: str, v: str) -> List[str]:
    """Metric segment {p : d(u,p) + d(v,p) = d(u,v)}, sorted."""
    _endpoints(u, v)
    return sorted(p for p in space.points if excess(space, u, v, p) == 0)


def delta_segment(space: FiniteMetricSpace, q: SegmentQuery) -> List[str]:
    """Relaxed segment {p : d(u,p) + d(v,p) < d(u,v) + delta} with strict inequality, sorted."""
    return sorted(p for p in space.points if excess(space, q.u, q.v, p) < q.delta)


def stabilization_gap(space: FiniteMetricSpace, u: str, v: str) -> Optional[Fraction]:
    """
    Smallest positive excess over points off the segment.

    For every 0 < delta <= gap the delta-segment equals the segment. None when
    every point lies on the segment.
    """
    _endpoints(u, v)
    gaps = [e for e in (excess(space, u, v, p) for p in space.points) if e > 0]
    return min(gaps) if gaps else None


def subset_line_check(
    space: FiniteMetricSpace, u: str, v: str, delta: Fraction, x: str
) -> Tuple[Fraction, bool]:
    """
    For x in the delta-segment of (u, v), returns delta' = d(u,v) + delta - d(u,x) - d(v,x)
    and whether both delta'-segments of (u, x) and (v, x) sit inside the delta-segment of (u, v).
    """
    outer = SegmentQuery(u, v, delta)
    inside = set(delta_segment(space, outer))
    if x not in inside:
        raise PreconditionError(f"{x!r} is not in the delta-segment of ({u!r}, {v!r})")
    delta_prime = space.d(u, v) + outer.delta - space.d(u, x) - space.d(v, x)
    covered = set()
    for end in (u, v):
        if end != x:
            covered.update(delta_segment(space, SegmentQuery(end, x, delta_prime)))
    return delta_prime, covered <= inside


def min_enclosing_radii(space: FiniteMetricSpace, u: str, v: str) -> EnclosingRadii:
    """
    Minimal r + s such that the segment of (u, v) sits in B(u, r d(u,v)) ∪ B(v, s d(u,v)).

    Works on the segment itself, i.e. the small-delta limit of the delta-segments.
    An optimal split puts every point with d(u, p) <= r on the u side, so the
    minimum is a sweep over prefixes of the interior sorted by d(u, .).
    """
    _endpoints(u, v)
    duv = space.d(u, v)
    interior = sorted(
        (space.d(u, p) / duv, p) for p in segment(space, u, v) if p not in (u, v)
    )
    if not interior:
        return EnclosingRadii(Fraction(0), Fraction(0))

    suffix_s = [Fraction(0)] * (len(interior) + 1)
    for k in range(len(interior) - 1, -1, -1):
        suffix_s[k] = max(suffix_s[k + 1], space.d(v, interior[k][1]) / duv)

    best_k, best = 0, None
    for k in range(len(interior) + 1):
        r = interior[k - 1][0] if k else Fraction(0)
        total = r + suffix_s[k]
        if best is None or total < best:
            best_k, best = k, total

    r = interior[best_k - 1][0] if best_k else Fraction(0)
    return EnclosingRadii(
        r=r,
        s=suffix_s[best_k],
        u_part=tuple(sorted(p for _, p in interior[:best_k])),
        v_part=tuple(sorted(p for _, p in interior[best_k:])),
    )
