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
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List

import bittensor as bt

from lipfree.base.metric import FiniteMetricSpace
from lipfree.errors import FormatError, PreconditionError


DEFAULT_MAX_POINTS = 64
RANDOM_SCHEMES = ("shortest-path", "euclidean-snap")


def _space(ids, labels, metric, base, kind, params) -> FiniteMetricSpace:
    dist = [[metric(labels[p], labels[q]) if p != q else Fraction(0) for q in ids] for p in ids]
    space = FiniteMetricSpace(ids, dist, base, labels=labels, meta={"kind": kind, "params": params})
    space.check()
    bt.logging.debug(f"Generated {space!r}")
    return space


def _example32_distance(p, q) -> Fraction:
    (a1, b1), (a2, b2) = p, q
    if b1 == b2:
        return abs(a1 - a2)
    return min(a1 + a2, 2 - a1 - a2) + abs(b1 - b2)


def gen_example32(depth: int) -> FiniteMetricSpace:
    """
    Levels 0..depth of the dyadic comb: x = (0, 0), y = (1, 0) and, for n >= 1, the level
    points (k/2^n, 1/2^n), k = 0..2^n, with ids ``s{n}_{k}``.

    Points on one level are |a1 - a2| apart; points on different levels travel down to the
    nearer end of the bottom edge and back up.
    """
    if depth < 1:
        raise PreconditionError(f"example32 depth must be >= 1, got {depth}")
    labels = {"x": (Fraction(0), Fraction(0)), "y": (Fraction(1), Fraction(0))}
    for n in range(1, depth + 1):
        h = Fraction(1, 2**n)
        for k in range(2**n + 1):
            labels[f"s{n}_{k}"] = (k * h, h)
    ids = list(labels)
    return _space(ids, labels, _example32_distance, "x", "example32", {"depth": depth})


def _sup_distance(p, q) -> Fraction:
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def gen_example46(k: int) -> FiniteMetricSpace:
    """
    Two vertical unit segments a = 0 and a = 1 sampled at step 1/2^k under the sup metric.

    Corners are x1 = (0, 0), y1 = (1, 0), x2 = (1, 1), y2 = (0, 1); interior samples are
    ``L{j}`` = (0, j/2^k) and ``R{j}`` = (1, j/2^k).
    """
    if k < 1:
        raise PreconditionError(f"example46 step exponent must be >= 1, got {k}")
    h = Fraction(1, 2**k)
    labels = {
        "x1": (Fraction(0), Fraction(0)),
        "y1": (Fraction(1), Fraction(0)),
        "x2": (Fraction(1), Fraction(1)),
        "y2": (Fraction(0), Fraction(1)),
    }
    for j in range(1, 2**k):
        labels[f"L{j}"] = (Fraction(0), j * h)
        labels[f"R{j}"] = (Fraction(1), j * h)
    return _space(list(labels), labels, _sup_distance, "x1", "example46", {"k": k})


def _taxicab(p, q) -> Fraction:
    return abs(p[0] - q[0]) + abs(p[1] - q[1])


def gen_grid(rows: int, cols: int, step=1) -> FiniteMetricSpace:
    """rows x cols lattice ``g{i}_{j}`` at (j*step, i*step) under the l1 metric, base g0_0."""
    step = Fraction(step)
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise PreconditionError(f"grid needs at least two points, got {rows}x{cols}")
    if step <= 0:
        raise PreconditionError(f"grid step must be positive, got {step}")
    labels = {f"g{i}_{j}": (j * step, i * step) for i in range(rows) for j in range(cols)}
    return _space(
        list(labels), labels, _taxicab, "g0_0", "grid", {"rows": rows, "cols": cols, "step": str(step)}
    )


def _shortest_path_matrix(n: int, rng: random.Random) -> List[List[Fraction]]:
    w = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = Fraction(rng.randint(1, 12), rng.choice((1, 2, 4)))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if w[i][k] + w[k][j] < w[i][j]:
                    w[i][j] = w[i][k] + w[k][j]
    return w


def gen_random(
    n: int, seed: int = 0, scheme: str = "shortest-path", max_points: int = DEFAULT_MAX_POINTS
) -> FiniteMetricSpace:
    """
    Random rational metric on ``p0..p{n-1}``, deterministic in ``seed``.

    ``shortest-path`` closes random edge weights on the complete graph; ``euclidean-snap``
    places distinct points on a quarter-step lattice and uses the l1 metric.
    """
    if scheme not in RANDOM_SCHEMES:
        raise PreconditionError(f"unknown random scheme {scheme!r}, expected one of {RANDOM_SCHEMES}")
    if not 2 <= n <= max_points:
        raise PreconditionError(f"random space size must be in [2, {max_points}], got {n}")
    rng = random.Random(seed)
    ids = [f"p{i}" for i in range(n)]
    params = {"n": n, "seed": seed, "scheme": scheme}

    if scheme == "shortest-path":
        w = _shortest_path_matrix(n, rng)
        space = FiniteMetricSpace(ids, w, ids[0], meta={"kind": "random", "params": params})
        space.check()
        return space

    side = max(4, n)
    coords = set()
    while len(coords) < n:
        coords.add((Fraction(rng.randint(0, side), 4), Fraction(rng.randint(0, side), 4)))
    labels = dict(zip(ids, sorted(coords)))
    return _space(ids, labels, _taxicab, ids[0], "random", params)


_PARAM_TYPES: Dict[str, Dict[str, type]] = {
    "example32": {"depth": int},
    "example46": {"k": int},
    "grid": {"rows": int, "cols": int, "step": Fraction},
    "random": {"n": int, "seed": int, "scheme": str},
}


@dataclass(frozen=True)
class GeneratorSpec:
    """
    A generator kind and its parameters, written ``kind:key=value,key=value``.

    >>> GeneratorSpec.parse("example46:k=3").build().size
    18
    """

    kind: str
    params: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _PARAM_TYPES:
            raise FormatError(f"unknown generator kind {self.kind!r}")
        unknown = set(self.params) - set(_PARAM_TYPES[self.kind])
        if unknown:
            raise FormatError(f"unknown {self.kind} parameters: {sorted(unknown)}")

    @classmethod
    def parse(cls, text: str) -> "GeneratorSpec":
        kind, _, rest = text.strip().partition(":")
        types = _PARAM_TYPES.get(kind)
        if types is None:
            raise FormatError(f"unknown generator kind {kind!r}")
        params = {}
        for item in filter(None, rest.split(",")):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in types:
                raise FormatError(f"bad generator parameter {item!r} for {kind}")
            try:
                params[key] = types[key](value.strip())
            except (ValueError, ZeroDivisionError) as e:
                raise FormatError(f"bad value for {kind}.{key}: {value!r}") from e
        return cls(kind, params)

    def build(self, max_points: int = DEFAULT_MAX_POINTS) -> FiniteMetricSpace:
        p = self.params
        if self.kind == "example32":
            return gen_example32(p.get("depth", 1))
        if self.kind == "example46":
            return gen_example46(p.get("k", 2))
        if self.kind == "grid":
            return gen_grid(p.get("rows", 2), p.get("cols", 2), p.get("step", 1))
        return gen_random(
            p.get("n", 4), p.get("seed", 0), p.get("scheme", "shortest-path"), max_points=max_points
        )

    def with_params(self, **overrides) -> "GeneratorSpec":
        return GeneratorSpec(self.kind, {**self.params, **overrides})

    def __str__(self) -> str:
        return f"{self.kind}:" + ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))

