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


import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import bittensor as bt

from lipfree.base.free import (
    FreeElement,
    LipschitzFunction,
    lipschitz_constant,
    mcshane_extend,
    pairing,
    require_unit_norm,
)
from lipfree.base.metric import FiniteMetricSpace
from lipfree.errors import PreconditionError
from lipfree.molecules.calculus import Presentation, terms_of
from lipfree.molecules.support import f_mu, support_function
from lipfree.utils.misc import ordered_pairs


@dataclass(frozen=True)
class Slice:
    """
    S(f, alpha) = {el in the unit ball : f(el) > 1 - alpha} for a norm-one f.

    Build through :meth:`checked` when the Lipschitz constant is not known to be 1.
    """

    f: LipschitzFunction
    alpha: Fraction
    slice_id: str = ""

    def __post_init__(self):
        alpha = Fraction(self.alpha)
        if not 0 < alpha < 1:
            raise PreconditionError(f"alpha must lie in (0, 1), got {alpha}")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def checked(cls, space: FiniteMetricSpace, f: LipschitzFunction, alpha, slice_id: str = "") -> "Slice":
        constant = lipschitz_constant(space, f)
        if constant != 1:
            raise PreconditionError(f"slice functional must have Lipschitz constant 1, got {constant}")
        return cls(f, Fraction(alpha), slice_id)

    def contains(self, el: FreeElement) -> bool:
        return pairing(self.f, el) > 1 - self.alpha

    def contains_molecule(self, space: FiniteMetricSpace, u: str, v: str) -> bool:
        return self.f(u) - self.f(v) > (1 - self.alpha) * space.d(u, v)


@dataclass(frozen=True)
class ScanRow:
    """Shortest molecule inside one slice."""

    slice_id: str
    alpha: Fraction
    min_length: Fraction
    witness: Tuple[str, str]


def _normalized(space: FiniteMetricSpace, f: LipschitzFunction) -> Optional[LipschitzFunction]:
    constant = lipschitz_constant(space, f)
    if constant == 0:
        return None
    return f.scale(1 / constant)


def make_slices(
    space: FiniteMetricSpace,
    el: FreeElement,
    alphas: Sequence,
    seed: int = 0,
    random_count: int = 4,
) -> List[Slice]:
    """
    Deterministic slice family around a unit-norm element.

    Functionals, in order: the norming potential; f_mu and the support function when
    ``el`` carries a presentation with weights summing to 1; ``random_count`` seeded
    min-envelopes of random two-point assignments, scaled to Lipschitz constant 1.
    Each is paired with every alpha and kept only if the slice contains ``el``.
    """
    if not alphas:
        raise PreconditionError("at least one alpha is required")
    alphas = [Fraction(a) for a in alphas]
    certificate = require_unit_norm(space, el)

    functionals = [("potential", certificate.potential)]
    if el.presentation and sum(t.weight for t in el.presentation) == 1:
        functionals.append(("f_mu", f_mu(space, el).f))
        functionals.append(("support", support_function(space, el)))

    rng = random.Random(seed)
    pts = sorted(space.points)
    for r in range(random_count if len(pts) > 1 else 0):
        p, q = rng.sample(pts, 2)
        t = Fraction(rng.randint(1, 8), 8)
        f = _normalized(space, mcshane_extend(space, {p: t * space.d(p, q), q: 0}, 1))
        if f is not None:
            functionals.append((f"random[{r}]", f))

    slices = []
    for name, f in functionals:
        for alpha in alphas:
            slc = Slice(f, alpha, f"{name}@{alpha}")
            if slc.contains(el):
                slices.append(slc)
    bt.logging.debug(f"{len(slices)} slices built from {len(functionals)} functionals")
    return slices


def delta_scan(space: FiniteMetricSpace, el: FreeElement, slices: Sequence[Slice]) -> List[ScanRow]:
    """
    Shortest molecule in each slice, by exhaustive search (ties lexicographic).

    Lengths that shrink along a discretization family are the finite trace of a
    Delta-point; a single finite space never certifies one.
    """
    rows = []
    for slc in slices:
        if not slc.contains(el):
            raise PreconditionError(f"slice {slc.slice_id or '?'} does not contain the element")
        best = None
        for u, v in ordered_pairs(space.points):
            if slc.contains_molecule(space, u, v):
                length = space.d(u, v)
                if best is None or length < best[0]:
                    best = (length, (u, v))
        rows.append(ScanRow(slc.slice_id, slc.alpha, best[0], best[1]))
    return rows


def slice_constituent(space: FiniteMetricSpace, presentation: Presentation, slc: Slice) -> Optional[int]:
    """
    Index (0-based) of the first term of a convex combination whose molecule lies in the slice.

    When the weights sum to 1 and the slice contains the combination, such a term exists.
    """
    for i, t in enumerate(terms_of(presentation, space)):
        if slc.contains_molecule(space, t.x, t.y):
            return i
    return None
