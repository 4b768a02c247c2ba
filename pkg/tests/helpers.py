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
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Optional, Tuple

from lipfree.base.free import LipschitzFunction, combine, lipschitz_constant
from lipfree.base.metric import (
    FiniteMetricSpace,
    min_enclosing_radii,
    stabilization_gap,
)
from lipfree.spaces import gen_random


def space_from_rows(ids: str, rows, base: Optional[str] = None) -> FiniteMetricSpace:
    """Small hand-written spaces: ``space_from_rows("abc", [[0, 1, 2], ...])``."""
    points = list(ids)
    return FiniteMetricSpace(points, [[Fraction(x) for x in row] for row in rows], base or points[0])


def equilateral(n: int = 3) -> FiniteMetricSpace:
    ids = [chr(ord("a") + i) for i in range(n)]
    return FiniteMetricSpace(ids, [[0 if i == j else 1 for j in range(n)] for i in range(n)], ids[0])


def _prufer_edges(seq, n: int) -> List[Tuple[int, int]]:
    degree = [1] * n
    for k in seq:
        degree[k] += 1
    edges = []
    for k in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, k))
        degree[leaf] -= 1
        degree[k] -= 1
    a, b = [i for i in range(n) if degree[i] == 1]
    edges.append((a, b))
    return edges


def brute_force_norm(space: FiniteMetricSpace, masses: Dict[str, Fraction]) -> Fraction:
    """
    Maximum of sum m(p) f(p) over {f : f(base) = 0, |f(p) - f(q)| <= d(p, q)} by
    enumerating the polytope's vertices: spanning trees with oriented tight edges.
    Meant for five points or fewer.
    """
    pts = list(space.points)
    n = len(pts)
    if n == 1:
        return Fraction(0)
    best = None
    for seq in product(range(n), repeat=n - 2):
        edges = _prufer_edges(seq, n)
        for signs in product((1, -1), repeat=n - 1):
            adjacent = {i: [] for i in range(n)}
            for (a, b), s in zip(edges, signs):
                adjacent[a].append((b, s))
                adjacent[b].append((a, -s))
            root = pts.index(space.base)
            f = {root: Fraction(0)}
            stack = [root]
            while stack:
                a = stack.pop()
                for b, s in adjacent[a]:
                    if b not in f:
                        f[b] = f[a] + s * space.d(pts[a], pts[b])
                        stack.append(b)
            feasible = all(
                abs(f[i] - f[j]) <= space.d(pts[i], pts[j]) for i, j in combinations(range(n), 2)
            )
            if not feasible:
                continue
            value = sum((Fraction(masses.get(pts[i], 0)) * f[i] for i in range(n)), Fraction(0))
            if best is None or value > best:
                best = value
    return best


def brute_force_segment(space: FiniteMetricSpace, u: str, v: str) -> set:
    return {p for p in space.points if space.d(u, p) + space.d(p, v) == space.d(u, v)}


def brute_force_radii(space: FiniteMetricSpace, u: str, v: str) -> Fraction:
    """min over all splits of the segment interior of max d(u, .) + max d(v, .), normalized."""
    duv = space.d(u, v)
    interior = sorted(brute_force_segment(space, u, v) - {u, v})
    best = None
    for mask in range(2 ** len(interior)):
        near_u = [p for k, p in enumerate(interior) if mask >> k & 1]
        near_v = [p for k, p in enumerate(interior) if not mask >> k & 1]
        total = max((space.d(u, p) for p in near_u), default=Fraction(0)) + max(
            (space.d(v, p) for p in near_v), default=Fraction(0)
        )
        if best is None or total < best:
            best = total
    return best / duv


def random_one_lipschitz(space: FiniteMetricSpace, rng: random.Random) -> LipschitzFunction:
    """Random function scaled to Lipschitz constant exactly 1."""
    while True:
        raw = LipschitzFunction.normalized(
            space, {p: Fraction(rng.randint(-20, 20), 4) for p in space.points}
        )
        constant = lipschitz_constant(space, raw)
        if constant:
            return raw.scale(1 / constant)


def random_unit_combination(space: FiniteMetricSpace, rng: random.Random, max_terms: int = 4):
    """
    A convex combination of molecules that are all tight for one 1-Lipschitz function,
    so it has norm exactly 1. Returns (terms, f).
    """
    f = random_one_lipschitz(space, rng)
    tight = [
        (p, q)
        for p in space.points
        for q in space.points
        if p != q and f(p) - f(q) == space.d(p, q)
    ]
    chosen = rng.sample(tight, min(len(tight), rng.randint(1, max_terms)))
    raw = [rng.randint(1, 4) for _ in chosen]
    total = sum(raw)
    terms = [(p, q, Fraction(w, total)) for (p, q), w in zip(chosen, raw)]
    return terms, f


def random_unit_element(space: FiniteMetricSpace, rng: random.Random, max_terms: int = 4):
    terms, _ = random_unit_combination(space, rng, max_terms)
    return combine(space, terms)


def descent_instance(seed: int):
    """
    A random space with (u, v, r, s, delta) meeting the descent preconditions: delta is
    below the stabilization gap, so the relaxed segment is the segment, and (r, s) come
    from the optimal split of its interior.
    """
    rng = random.Random(seed)
    space = gen_random(rng.randint(4, 8), seed=seed)
    u, v = rng.sample(sorted(space.points), 2)
    duv = space.d(u, v)
    gap = stabilization_gap(space, u, v)
    delta = gap if gap is not None else Fraction(1)
    radii = min_enclosing_radii(space, u, v)
    r, s = radii.r * duv, radii.s * duv
    # Widen the balls a little while keeping r + s < d(u, v).
    room = duv - r - s
    r += room * Fraction(rng.randint(0, 3), 8)
    s += room * Fraction(rng.randint(0, 3), 8)
    return space, u, v, r, s, delta

