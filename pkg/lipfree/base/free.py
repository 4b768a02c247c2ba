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
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import bittensor as bt

from lipfree.base.flow import solve_transport
from lipfree.base.metric import FiniteMetricSpace
from lipfree.errors import FormatError, PreconditionError


@dataclass(frozen=True)
class MoleculeTerm:
    """One weighted molecule ``weight * (delta_x - delta_y) / d(x, y)`` of a presentation."""

    x: str
    y: str
    weight: Fraction

    def __post_init__(self):
        if self.x == self.y:
            raise PreconditionError("molecule requires distinct points")
        weight = Fraction(self.weight)
        if weight <= 0:
            raise PreconditionError(f"molecule weights must be positive, got {weight}")
        object.__setattr__(self, "weight", weight)


TermLike = Union[MoleculeTerm, Sequence]


def as_term(term: TermLike) -> MoleculeTerm:
    if isinstance(term, MoleculeTerm):
        return term
    x, y, weight = term
    return MoleculeTerm(x, y, Fraction(weight))


class FreeElement:
    """
    A finitely supported signed measure of total mass zero.

    Equality and hashing look at the measure only. The optional presentation
    (a list of molecule terms) is carried along because membership questions
    about decompositions depend on it.
    """

    __slots__ = ("_masses", "_presentation")

    def __init__(
        self,
        masses: Mapping[str, Fraction],
        presentation: Optional[Iterable[TermLike]] = None,
    ):
        cleaned = {str(p): Fraction(m) for p, m in masses.items() if m != 0}
        if sum(cleaned.values(), Fraction(0)) != 0:
            raise PreconditionError("free elements must have total mass zero")
        self._masses = MappingProxyType(dict(sorted(cleaned.items())))
        self._presentation = (
            None if presentation is None else tuple(as_term(t) for t in presentation)
        )

    @classmethod
    def zero(cls) -> "FreeElement":
        return cls({}, ())

    @property
    def masses(self) -> Mapping[str, Fraction]:
        return self._masses

    @property
    def presentation(self) -> Optional[Tuple[MoleculeTerm, ...]]:
        return self._presentation

    def mass(self, p: str) -> Fraction:
        return self._masses.get(p, Fraction(0))

    def support(self):
        return list(self._masses)

    @property
    def is_zero(self) -> bool:
        return not self._masses

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeElement):
            return NotImplemented
        return dict(self._masses) == dict(other._masses)

    def __hash__(self) -> int:
        return hash(tuple(self._masses.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{p}: {m}" for p, m in self._masses.items())
        return f"FreeElement({{{body}}})"

    def _combined(self, other: "FreeElement", sign: int) -> Dict[str, Fraction]:
        out = dict(self._masses)
        for p, m in other._masses.items():
            out[p] = out.get(p, Fraction(0)) + sign * m
        return out

    def __add__(self, other: "FreeElement") -> "FreeElement":
        presentation = None
        if self._presentation is not None and other._presentation is not None:
            presentation = self._presentation + other._presentation
        return FreeElement(self._combined(other, 1), presentation)

    def __sub__(self, other: "FreeElement") -> "FreeElement":
        return FreeElement(self._combined(other, -1))

    def __neg__(self) -> "FreeElement":
        presentation = None
        if self._presentation is not None:
            presentation = [MoleculeTerm(t.y, t.x, t.weight) for t in self._presentation]
        return FreeElement({p: -m for p, m in self._masses.items()}, presentation)

    def scale(self, a) -> "FreeElement":
        a = Fraction(a)
        if a < 0:
            return (-self).scale(-a)
        presentation = None
        if self._presentation is not None and a > 0:
            presentation = [MoleculeTerm(t.x, t.y, a * t.weight) for t in self._presentation]
        return FreeElement({p: a * m for p, m in self._masses.items()}, presentation)


class LipschitzFunction:
    """Exact rational values on every point of a space; the dual object of :class:`FreeElement`."""

    __slots__ = ("_values",)

    def __init__(self, values: Mapping[str, Fraction]):
        self._values = MappingProxyType({str(p): Fraction(v) for p, v in sorted(values.items())})

    @classmethod
    def normalized(cls, space: FiniteMetricSpace, values: Mapping[str, Fraction]) -> "LipschitzFunction":
        """Shifts ``values`` so the base point maps to 0; every point of ``space`` must be present."""
        missing = [p for p in space.points if p not in values]
        if missing:
            raise FormatError(f"function has no value at {missing[:5]}")
        shift = Fraction(values[space.base])
        return cls({p: Fraction(values[p]) - shift for p in space.points})

    @classmethod
    def zero(cls, space: FiniteMetricSpace) -> "LipschitzFunction":
        return cls({p: Fraction(0) for p in space.points})

    @property
    def values(self) -> Mapping[str, Fraction]:
        return self._values

    def __call__(self, p: str) -> Fraction:
        try:
            return self._values[p]
        except KeyError:
            raise FormatError(f"function has no value at {p!r}") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, LipschitzFunction):
            return NotImplemented
        return dict(self._values) == dict(other._values)

    def __hash__(self) -> int:
        return hash(tuple(self._values.items()))

    def __repr__(self) -> str:
        return f"LipschitzFunction({dict(self._values)})"

    def scale(self, a) -> "LipschitzFunction":
        a = Fraction(a)
        return LipschitzFunction({p: a * v for p, v in self._values.items()})


@dataclass(frozen=True)
class NormCertificate:
    """
    Value of the free-space norm with its primal and dual witnesses.

    Attributes:
        value (Fraction): the norm.
        flow (tuple): (from, to, amount) transport plan attaining ``value``.
        potential (LipschitzFunction): 1-Lipschitz function whose pairing with the
            element equals ``value``.
    """

    value: Fraction
    flow: Tuple[Tuple[str, str, Fraction], ...]
    potential: LipschitzFunction

    def verify(self, space: FiniteMetricSpace, el: FreeElement) -> bool:
        """Re-checks conservation, cost, the Lipschitz bound and the zero duality gap."""
        net: Dict[str, Fraction] = {}
        cost = Fraction(0)
        for p, q, amount in self.flow:
            if amount <= 0:
                return False
            net[p] = net.get(p, Fraction(0)) + amount
            net[q] = net.get(q, Fraction(0)) - amount
            cost += amount * space.d(p, q)
        for p in set(net) | set(el.masses):
            if net.get(p, 0) != el.mass(p):
                return False
        return (
            cost == self.value
            and lipschitz_constant(space, self.potential) <= 1
            and pairing(self.potential, el) == self.value
        )


def molecule(space: FiniteMetricSpace, x: str, y: str) -> FreeElement:
    """(delta_x - delta_y) / d(x, y), presented as the single term (x, y, 1)."""
    if x == y:
        raise PreconditionError("molecule requires distinct points")
    dxy = space.d(x, y)
    return FreeElement({x: 1 / dxy, y: -1 / dxy}, [MoleculeTerm(x, y, Fraction(1))])


def combine(space: FiniteMetricSpace, terms: Iterable[TermLike]) -> FreeElement:
    """
    Expands sum weight_i * m_{x_i y_i} and keeps the terms as the presentation.

    Weights need not sum to 1. An empty list gives the zero element with an empty presentation.
    """
    presentation = [as_term(t) for t in terms]
    masses: Dict[str, Fraction] = {}
    for t in presentation:
        share = t.weight / space.d(t.x, t.y)
        masses[t.x] = masses.get(t.x, Fraction(0)) + share
        masses[t.y] = masses.get(t.y, Fraction(0)) - share
    return FreeElement(masses, presentation)


def presentation_matches(space: FiniteMetricSpace, el: FreeElement) -> bool:
    """True when the element has a presentation whose expansion equals its masses."""
    if el.presentation is None:
        return False
    return combine(space, el.presentation) == el


def as_molecule(space: FiniteMetricSpace, el: FreeElement) -> Optional[Tuple[str, str]]:
    """(x, y) when ``el`` is exactly the molecule m_xy, else None."""
    if el.presentation is not None and len(el.presentation) == 1:
        term = el.presentation[0]
        if term.weight == 1:
            return term.x, term.y
    if len(el.masses) != 2:
        return None
    (p, mp), (q, mq) = el.masses.items()
    x, y, mx = (p, q, mp) if mp > 0 else (q, p, mq)
    if mx == 1 / space.d(x, y):
        return x, y
    return None


def pairing(f: LipschitzFunction, el: FreeElement) -> Fraction:
    """sum_p masses(p) f(p)."""
    return sum((m * f(p) for p, m in el.masses.items()), Fraction(0))


def lipschitz_constant(space: FiniteMetricSpace, f: LipschitzFunction) -> Fraction:
    best = Fraction(0)
    pts = space.points
    for i, p in enumerate(pts):
        fp = f(p)
        for q in pts[i + 1 :]:
            ratio = abs(fp - f(q)) / space.d(p, q)
            if ratio > best:
                best = ratio
    return best


def _check_partial(space: FiniteMetricSpace, partial: Mapping[str, Fraction], L: Fraction):
    if L <= 0:
        raise PreconditionError(f"Lipschitz bound must be positive, got {L}")
    if not partial:
        raise PreconditionError("cannot extend from an empty domain")
    dom = sorted(partial)
    for p in dom:
        space.index(p)
    for i, p in enumerate(dom):
        for q in dom[i + 1 :]:
            if abs(Fraction(partial[p]) - Fraction(partial[q])) > L * space.d(p, q):
                raise PreconditionError(
                    f"partial assignment is not {L}-Lipschitz on ({p!r}, {q!r})"
                )


def envelope(
    space: FiniteMetricSpace,
    partial: Mapping[str, Fraction],
    L,
    upper: bool = True,
) -> Dict[str, Fraction]:
    """
    Unshifted L-Lipschitz extension of ``partial``.

    ``upper`` selects min_q partial(q) + L d(p, q), the largest extension; otherwise
    max_q partial(q) - L d(p, q), the smallest one.
    """
    L = Fraction(L)
    _check_partial(space, partial, L)
    dom = [(q, Fraction(v)) for q, v in sorted(partial.items())]
    if upper:
        return {p: min(v + L * space.d(p, q) for q, v in dom) for p in space.points}
    return {p: max(v - L * space.d(p, q) for q, v in dom) for p in space.points}


def mcshane_extend(
    space: FiniteMetricSpace,
    partial: Mapping[str, Fraction],
    L=1,
    variant: str = "mcshane",
) -> LipschitzFunction:
    """
    Extends an L-Lipschitz partial assignment to the whole space and shifts it to vanish at the base.

    Args:
        space (FiniteMetricSpace): the metric.
        partial (Mapping[str, Fraction]): values on a nonempty subset of points.
        L: Lipschitz bound, positive.
        variant (str): ``mcshane`` (min-envelope, default) or ``whitney`` (max-envelope).

    Returns:
        LipschitzFunction: agrees with ``partial`` up to one constant shift.
    """
    if variant not in ("mcshane", "whitney"):
        raise PreconditionError(f"unknown extension variant {variant!r}")
    return LipschitzFunction.normalized(
        space, envelope(space, partial, L, upper=(variant == "mcshane"))
    )


def norm(space: FiniteMetricSpace, el: FreeElement) -> NormCertificate:
    """
    Exact free-space norm with a transport plan and a Kantorovich potential.

    The potential is computed on the support by the solver, extended to the
    whole space by the min-envelope and shifted to vanish at the base point.
    """
    if el.is_zero:
        return NormCertificate(Fraction(0), (), LipschitzFunction.zero(space))
    plan = solve_transport(space, el.masses)
    potential = mcshane_extend(space, plan.potential, 1)
    bt.logging.debug(f"norm over support {el.support()} = {plan.cost}")
    return NormCertificate(plan.cost, plan.flow, potential)


def require_unit_norm(space: FiniteMetricSpace, el: FreeElement) -> NormCertificate:
    certificate = norm(space, el)
    if certificate.value != 1:
        raise PreconditionError(f"element must have norm 1, got {certificate.value}")
    return certificate
