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
from itertools import permutations
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import bittensor as bt

from lipfree.base.free import FreeElement, MoleculeTerm, TermLike, as_term, presentation_matches
from lipfree.base.metric import FiniteMetricSpace
from lipfree.errors import PreconditionError


Presentation = Union[FreeElement, Sequence[TermLike]]


def terms_of(
    presentation: Presentation, space: Optional[FiniteMetricSpace] = None
) -> Tuple[MoleculeTerm, ...]:
    """Molecule terms of a presentation. With ``space``, an element's terms must expand to its masses."""
    if isinstance(presentation, FreeElement):
        if presentation.presentation is None:
            raise PreconditionError("element carries no molecule presentation")
        if space is not None and not presentation_matches(space, presentation):
            raise PreconditionError("element presentation does not expand to its masses")
        return presentation.presentation
    return tuple(as_term(t) for t in presentation)


@dataclass(frozen=True)
class PairNormReport:
    """
    Closed form of ||m_xy + m_uv||.

    Attributes:
        value (Fraction): the norm, in [0, 2].
        epsilon_star (Fraction): (d(x,y) + d(u,v) - d(x,v) - d(u,y)) / max(d(x,y), d(u,v)),
            the epsilon for which the defining inequality is an equality; value = 2 - epsilon_star
            whenever epsilon_star >= 0.
        attained_by_cap (bool): the uncapped expression exceeded 2.
    """

    value: Fraction
    epsilon_star: Fraction
    attained_by_cap: bool


class CycleSlack(NamedTuple):
    lhs: Fraction
    rhs: Fraction
    slack: Fraction


def pair_sum_norm(space: FiniteMetricSpace, x: str, y: str, u: str, v: str) -> PairNormReport:
    """
    ||m_xy + m_uv|| = min(2, (d(x,v) + d(u,y) + |d(x,y) - d(u,v)|) / max(d(x,y), d(u,v))).

    The cap is exact: two unit vectors never sum past 2, and below the cap the
    expression is attained.
    """
    if x == y or u == v:
        raise PreconditionError("molecule requires distinct points")
    dxy, duv = space.d(x, y), space.d(u, v)
    top = max(dxy, duv)
    raw = (space.d(x, v) + space.d(u, y) + abs(dxy - duv)) / top
    epsilon_star = 2 - raw
    return PairNormReport(
        value=min(Fraction(2), raw),
        epsilon_star=epsilon_star,
        attained_by_cap=raw > 2,
    )


def pair_distance(space: FiniteMetricSpace, x: str, y: str, u: str, v: str) -> Fraction:
    """||m_xy - m_uv||, using m_vu = -m_uv."""
    return pair_sum_norm(space, x, y, v, u).value


def _check_cycle(cycle: Sequence[int], n: int) -> List[int]:
    ks = list(cycle)
    if n == 0:
        raise PreconditionError("presentation is empty")
    if len(ks) < 2 or ks[0] != ks[-1]:
        raise PreconditionError(f"cycle must be closed (k_1 = k_(m+1)), got {ks}")
    for k in ks:
        if not isinstance(k, int) or not 1 <= k <= n:
            raise PreconditionError(f"cycle index {k!r} outside 1..{n}")
    return [k - 1 for k in ks]


def cycle_inequality(
    space: FiniteMetricSpace, presentation: Presentation, cycle: Sequence[int]
) -> CycleSlack:
    """
    Both sides of sum_j d(x_{k_j}, y_{k_{j+1}}) >= sum_j d(x_{k_j}, y_{k_j}).

    ``cycle`` lists 1-based term indices and repeats its first index at the end.
    The slack is negative only for combinations that are not norm-attaining.
    """
    terms = terms_of(presentation, space)
    ks = _check_cycle(cycle, len(terms))
    lhs = sum(
        (space.d(terms[a].x, terms[b].y) for a, b in zip(ks, ks[1:])), Fraction(0)
    )
    rhs = sum((space.d(terms[a].x, terms[a].y) for a in ks[:-1]), Fraction(0))
    return CycleSlack(lhs, rhs, lhs - rhs)


def rerepresent(
    space: FiniteMetricSpace, presentation: Presentation, cycle: Sequence[int]
) -> Tuple[MoleculeTerm, ...]:
    """
    Rewrites a presentation along a zero-slack cycle.

    With lambda_0 = min_i weight_i / d(x_i, y_i) over all terms, every cycle term keeps
    weight_i - lambda_0 d(x_i, y_i) and the cycle contributes the cross molecules
    (x_{k_j}, y_{k_{j+1}}) with weight lambda_0 d(x_{k_j}, y_{k_{j+1}}). Terms whose weight
    drops to zero and cross pairs with x = y are left out. The expanded measure and
    the total weight are unchanged.
    """
    terms = terms_of(presentation, space)
    ks = _check_cycle(cycle, len(terms))
    body = ks[:-1]
    if len(set(body)) != len(body):
        raise PreconditionError(f"cycle indices must be pairwise distinct, got {list(cycle)}")
    slack = cycle_inequality(space, terms, cycle).slack
    if slack != 0:
        raise PreconditionError(f"cycle has nonzero slack {slack}")

    lambda_0 = min(t.weight / space.d(t.x, t.y) for t in terms)
    on_cycle = set(body)
    out: List[MoleculeTerm] = []
    for i, t in enumerate(terms):
        weight = t.weight - lambda_0 * space.d(t.x, t.y) if i in on_cycle else t.weight
        if weight > 0:
            out.append(MoleculeTerm(t.x, t.y, weight))
    for a, b in zip(ks, ks[1:]):
        x, y = terms[a].x, terms[b].y
        if x != y:
            out.append(MoleculeTerm(x, y, lambda_0 * space.d(x, y)))
    return tuple(out)


def find_zero_slack_cycles(
    space: FiniteMetricSpace,
    presentation: Presentation,
    max_length: Optional[int] = None,
) -> List[Tuple[int, ...]]:
    """
    Closed cycles of pairwise-distinct indices (length >= 2) with zero slack.

    Each cycle is reported once, rotated so its smallest index comes first.
    """
    terms = terms_of(presentation, space)
    n = len(terms)
    limit = n if max_length is None else min(n, max_length)
    found = []
    for m in range(2, limit + 1):
        for perm in permutations(range(n), m):
            if perm[0] != min(perm):
                continue
            cycle = tuple(k + 1 for k in perm) + (perm[0] + 1,)
            if cycle_inequality(space, terms, cycle).slack == 0:
                found.append(cycle)
    bt.logging.debug(f"{len(found)} zero-slack cycles among {n} terms")
    return found

