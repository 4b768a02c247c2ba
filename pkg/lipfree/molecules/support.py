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
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import bittensor as bt

from lipfree.base.free import (
    FreeElement,
    LipschitzFunction,
    MoleculeTerm,
    combine,
    envelope,
    molecule,
    norm,
    pairing,
    require_unit_norm,
)
from lipfree.base.metric import FiniteMetricSpace
from lipfree.errors import PreconditionError
from lipfree.molecules.calculus import Presentation, terms_of
from lipfree.utils.misc import ordered_pairs


# Newton steps on a convex piecewise-linear function visit each linear piece at
# most twice; this only guards against a solver bug.
MAX_NEWTON_STEPS = 10_000


@dataclass(frozen=True)
class MuWitness:
    """mu = lam * m_uv + (1 - lam) * residual with ||residual|| = 1 and lam in (0, 1]."""

    u: str
    v: str
    lam: Fraction
    residual: FreeElement


@dataclass(frozen=True)
class MuSet:
    """
    Molecules that can be split off a unit-norm element.

    Attributes:
        members (tuple): one :class:`MuWitness` per member, sorted by (u, v).
        excluded (tuple): (u, v, pairing) for candidates ruled out by the dual potential,
            i.e. pairing(potential, m_uv) < 1.
        rejected (tuple): (u, v) candidates that passed the potential filter but have lambda_max = 0.
        potential (LipschitzFunction): the norming functional used as exclusion certificate.
    """

    members: Tuple[MuWitness, ...]
    excluded: Tuple[Tuple[str, str, Fraction], ...]
    rejected: Tuple[Tuple[str, str], ...]
    potential: LipschitzFunction

    def __contains__(self, pair) -> bool:
        return self.witness(*pair) is not None

    def pairs(self) -> List[Tuple[str, str]]:
        return [(w.u, w.v) for w in self.members]

    def witness(self, u: str, v: str) -> Optional[MuWitness]:
        for w in self.members:
            if (w.u, w.v) == (u, v):
                return w
        return None


def lambda_max(space: FiniteMetricSpace, el: FreeElement, u: str, v: str) -> Tuple[Fraction, FreeElement]:
    """
    Largest lam in [0, 1] with ||el - lam m_uv|| <= 1 - lam, for a unit-norm ``el``.

    phi(lam) = ||el - lam m_uv|| + lam is convex, piecewise linear and >= 1 with
    phi(0) = 1, so the answer is the right end of {phi = 1}. Newton steps from
    lam = 1 along supporting lines given by the solver's potentials reach it exactly.

    Returns:
        (lam, residual): residual is (el - lam m_uv) / (1 - lam), m_uv itself when lam = 1,
        and the zero element when lam = 0.
    """
    m = molecule(space, u, v)
    lam = Fraction(1)
    for _ in range(MAX_NEWTON_STEPS):
        certificate = norm(space, el - m.scale(lam))
        phi = certificate.value + lam
        if phi <= 1:
            break
        slope = 1 - pairing(certificate.potential, m)
        lam -= (phi - 1) / slope
        if lam <= 0:
            return Fraction(0), FreeElement.zero()
    else:
        raise RuntimeError(f"lambda_max did not converge for ({u}, {v})")
    if lam == 1:
        return lam, m
    return lam, (el - m.scale(lam)).scale(1 / (1 - lam))


def _candidate_points(space: FiniteMetricSpace, el: FreeElement, all_pairs: bool) -> Set[str]:
    if all_pairs:
        return set(space.points)
    points = set(el.support())
    if el.presentation is not None:
        for t in el.presentation:
            points.update((t.x, t.y))
    return points


def mu_set(space: FiniteMetricSpace, el: FreeElement, all_pairs: bool = False) -> MuSet:
    """
    Decides membership of m_uv in M(el) for every ordered candidate pair.

    Candidates are pairs over the support and the presentation points of ``el``;
    ``all_pairs`` sweeps the whole space instead. A pair is a member iff
    lambda_max > 0. Pairs with pairing(potential, m_uv) < 1 for the norming
    potential are excluded without solving.
    """
    if el.presentation is not None:
        terms_of(el, space)
    certificate = require_unit_norm(space, el)
    g = certificate.potential
    members, excluded, rejected = [], [], []
    for u, v in ordered_pairs(_candidate_points(space, el, all_pairs)):
        value = (g(u) - g(v)) / space.d(u, v)
        if value < 1:
            excluded.append((u, v, value))
            continue
        lam, residual = lambda_max(space, el, u, v)
        if lam > 0:
            members.append(MuWitness(u, v, lam, residual))
        else:
            rejected.append((u, v))
    bt.logging.debug(
        f"M(mu): {len(members)} members, {len(excluded)} excluded by potential, {len(rejected)} rejected"
    )
    return MuSet(tuple(members), tuple(excluded), tuple(rejected), g)


def _unit_combination(space: FiniteMetricSpace, presentation: Presentation):
    terms = terms_of(presentation, space)
    if not terms:
        raise PreconditionError("presentation is empty")
    total = sum((t.weight for t in terms), Fraction(0))
    if total != 1:
        raise PreconditionError(f"presentation weights must sum to 1, got {total}")
    mu = combine(space, terms)
    certificate = require_unit_norm(space, mu)
    return terms, mu, certificate


def _cross_pairs(terms: Sequence[MoleculeTerm]) -> List[Tuple[int, int]]:
    n = len(terms)
    return [(i, j) for i in range(n) for j in range(n) if terms[i].x != terms[j].y]


def _tight_closure(space, g: LipschitzFunction, terms: Sequence[MoleculeTerm], start: int) -> Set[int]:
    """Indices reachable from ``start`` along steps a -> b with g(x_a) - g(y_b) = d(x_a, y_b)."""
    reached = {start}
    stack = [start]
    while stack:
        a = stack.pop()
        xa = terms[a].x
        for b, t in enumerate(terms):
            if b not in reached and g(xa) - g(t.y) == space.d(xa, t.y):
                reached.add(b)
                stack.append(b)
    return reached


def support_function(space: FiniteMetricSpace, presentation: Presentation) -> LipschitzFunction:
    """
    Norming functional that separates M(mu) among the cross molecules.

    For a unit-norm mu = sum lambda_i m_{x_i y_i} with weights summing to 1, returns a
    1-Lipschitz f with f(mu) = 1 such that, for x_i != y_j, f(m_{x_i y_j}) = 1 exactly
    when m_{x_i y_j} is in M(mu).

    Starting from the solver's potential g, every failing cross pair (k1, k2) gets its
    own h_k: g itself when g(m_{x_k1 y_k2}) < 1, otherwise g raised by delta on the points
    of the terms reachable from k2 through tight steps, then extended by the min-envelope.
    The result is the average of the h_k, shifted to vanish at the base.
    """
    terms, mu, certificate = _unit_combination(space, presentation)
    g = certificate.potential

    failing = [
        (i, j)
        for i, j in _cross_pairs(terms)
        if lambda_max(space, mu, terms[i].x, terms[j].y)[0] == 0
    ]
    if not failing:
        return g

    anchors = sorted({t.x for t in terms} | {t.y for t in terms})
    gaps = [
        space.d(p, q) - (g(p) - g(q))
        for p in anchors
        for q in anchors
        if p != q and g(p) - g(q) < space.d(p, q)
    ]
    delta = min(gaps) / 2

    total: Dict[str, Fraction] = {p: Fraction(0) for p in space.points}
    for k1, k2 in failing:
        x, y = terms[k1].x, terms[k2].y
        if g(x) - g(y) < space.d(x, y):
            h = g.values
        else:
            raised = set()
            for i in _tight_closure(space, g, terms, k2):
                raised.update((terms[i].x, terms[i].y))
            h = envelope(
                space, {p: g(p) + (delta if p in raised else 0) for p in anchors}, 1
            )
        for p in space.points:
            total[p] += h[p]
    count = len(failing)
    bt.logging.debug(f"support function averaged over {count} failing cross pairs")
    return LipschitzFunction.normalized(space, {p: v / count for p, v in total.items()})


@dataclass(frozen=True)
class FMu:
    """Slice-shortening functional and the bound on alpha below which it works."""

    f: LipschitzFunction
    delta: Fraction


def bisector_kernel(space: FiniteMetricSpace, x: str, y: str) -> Dict[str, Fraction]:
    """p -> (d(x,y)/2) (d(y,p) - d(x,p)) / (d(x,p) + d(y,p))."""
    if x == y:
        raise PreconditionError("kernel requires distinct points")
    half = space.d(x, y) / 2
    return {
        p: half * (space.d(y, p) - space.d(x, p)) / (space.d(x, p) + space.d(y, p))
        for p in space.points
    }


def f_mu(space: FiniteMetricSpace, presentation: Presentation) -> FMu:
    """
    Builds f_mu(p) = max_i (g(x_i) - h_i(p)) shifted to vanish at the base, where g is
    :func:`support_function` and

        h_i(p) = max over j with x_i != y_j of (g(x_i) - g(y_j)) d(x_i, p) / (d(x_i, p) + d(y_j, p)).

    ``delta`` is min over cross pairs with g(x_i) - g(y_j) < d(x_i, y_j) of
    1 - (g(x_i) - g(y_j)) / d(x_i, y_j), capped at 1. Every alpha in (0, delta) works.
    """
    terms = terms_of(presentation, space)
    g = support_function(space, terms)
    cross = _cross_pairs(terms)
    partners = {i: [j for a, j in cross if a == i] for i in range(len(terms))}

    values = {}
    for p in space.points:
        best = None
        for i, ti in enumerate(terms):
            dxp = space.d(ti.x, p)
            h = max(
                (g(ti.x) - g(terms[j].y)) * dxp / (dxp + space.d(terms[j].y, p))
                for j in partners[i]
            )
            candidate = g(ti.x) - h
            if best is None or candidate > best:
                best = candidate
        values[p] = best

    delta = Fraction(1)
    for i, j in cross:
        x, y = terms[i].x, terms[j].y
        drop = g(x) - g(y)
        if drop < space.d(x, y):
            delta = min(delta, 1 - drop / space.d(x, y))
    return FMu(LipschitzFunction.normalized(space, values), delta)


def check_f_mu_slice_property(
    space: FiniteMetricSpace,
    presentation: Presentation,
    f: LipschitzFunction,
    alpha: Fraction,
    members: Optional[Iterable[Tuple[str, str]]] = None,
) -> List[Tuple[str, str]]:
    """
    Exhaustively checks the slice property of f_mu at level ``alpha``.

    Every molecule m_uv with pairing(f, m_uv) > 1 - alpha must admit a member
    m_{x_i y_j} of M(mu), x_i != y_j, with
    (1 - alpha) max(d(x_i,v) + d(y_j,v), d(x_i,u) + d(y_j,u)) < d(x_i, y_j).

    Returns:
        list: the in-slice pairs (u, v) for which no such (i, j) exists.
    """
    terms = terms_of(presentation, space)
    mu = combine(space, terms)
    if members is None:
        members = mu_set(space, mu).pairs()
    members = set(members)
    usable = sorted(
        {(terms[i].x, terms[j].y) for i, j in _cross_pairs(terms)} & members
    )
    failures = []
    for u, v in ordered_pairs(space.points):
        if (f(u) - f(v)) / space.d(u, v) <= 1 - alpha:
            continue
        if not any(
            (1 - alpha) * max(space.d(x, v) + space.d(y, v), space.d(x, u) + space.d(y, u))
            < space.d(x, y)
            for x, y in usable
        ):
            failures.append((u, v))
    return failures
