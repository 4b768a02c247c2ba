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


import unittest
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from lipfree.base.metric import validate
from lipfree.errors import FormatError, PreconditionError
from lipfree.spaces import GeneratorSpec, gen_example32, gen_example46, gen_grid, gen_random


class CombTestCase(unittest.TestCase):
    def test_depth_one(self):
        space = gen_example32(1)
        self.assertEqual(sorted(space.points), ["s1_0", "s1_1", "s1_2", "x", "y"])
        self.assertEqual(space.d("x", "s1_1"), 1)
        self.assertEqual(space.d("x", "y"), 1)
        self.assertEqual(space.base, "x")
        self.assertEqual(space.label_of("s1_1"), (Fraction(1, 2), Fraction(1, 2)))
        self.assertEqual(space.meta, {"kind": "example32", "params": {"depth": 1}})

    def test_comb_midpoint_at_depth_four(self):
        space = gen_example32(4)
        z = space.find_label(Fraction(1, 2), Fraction(1, 16))
        self.assertEqual(z, "s4_8")
        self.assertEqual(space.d("x", z), Fraction(9, 16))
        self.assertEqual(space.d("y", z), Fraction(9, 16))

    def test_depth_must_be_positive(self):
        with self.assertRaises(PreconditionError):
            gen_example32(0)


@pytest.mark.parametrize("depth", [1, 2, 3, 4, 5])
def test_comb_cardinality_and_axioms(depth):
    space = gen_example32(depth)
    assert space.size == 2 ** (depth + 1) + depth
    assert validate(space).ok


class TwoColumnTestCase(unittest.TestCase):
    def test_corners_are_one_apart(self):
        for k in (1, 2, 3):
            space = gen_example46(k)
            for x, y in [("x1", "y1"), ("x1", "y2"), ("x2", "y1"), ("x2", "y2")]:
                self.assertEqual(space.d(x, y), 1)

    def test_quarter_step(self):
        space = gen_example46(2)
        p = space.find_label(0, Fraction(1, 4))
        q = space.find_label(0, Fraction(1, 2))
        r = space.find_label(1, Fraction(1, 2))
        self.assertEqual(space.d(p, q), Fraction(1, 4))
        self.assertEqual(space.d(p, r), 1)
        self.assertEqual(space.size, 10)

    def test_sup_metric_everywhere(self):
        space = gen_example46(3)
        for p, q in combinations(space.points, 2):
            (a1, b1), (a2, b2) = space.label_of(p), space.label_of(q)
            self.assertEqual(space.d(p, q), max(abs(a1 - a2), abs(b1 - b2)))

    def test_step_exponent_must_be_positive(self):
        with self.assertRaises(PreconditionError):
            gen_example46(0)


def test_grid_is_taxicab():
    space = gen_grid(2, 3, Fraction(1, 2))
    assert space.size == 6
    assert space.d("g0_0", "g1_2") == Fraction(3, 2)
    assert space.base == "g0_0"


@pytest.mark.parametrize("scheme", ["shortest-path", "euclidean-snap"])
def test_random_spaces_are_deterministic(scheme):
    a = gen_random(6, seed=11, scheme=scheme)
    b = gen_random(6, seed=11, scheme=scheme)
    assert a.matrix() == b.matrix()
    assert a.points == b.points


def test_two_point_random_space():
    space = gen_random(2, seed=3)
    assert space.d("p0", "p1") > 0
    assert validate(space).ok


def test_random_size_limits():
    with pytest.raises(PreconditionError):
        gen_random(1, seed=0)
    with pytest.raises(PreconditionError):
        gen_random(10, seed=0, max_points=8)
    with pytest.raises(PreconditionError):
        gen_random(4, seed=0, scheme="gaussian")


@settings(max_examples=500, deadline=None)
@given(
    st.integers(min_value=0, max_value=100_000),
    st.integers(min_value=2, max_value=9),
    st.sampled_from(["shortest-path", "euclidean-snap"]),
)
def test_random_spaces_are_metrics(seed, n, scheme):
    assert validate(gen_random(n, seed=seed, scheme=scheme)).ok


@pytest.mark.parametrize(
    "text, size",
    [
        ("example32:depth=2", 10),
        ("example46:k=3", 18),
        ("grid:rows=2,cols=3,step=1/2", 6),
        ("random:n=5,seed=4,scheme=euclidean-snap", 5),
    ],
)
def test_generator_spec(text, size):
    spec = GeneratorSpec.parse(text)
    space = spec.build()
    assert space.size == size
    assert GeneratorSpec.parse(str(spec)) == spec


@pytest.mark.parametrize("text", ["torus:n=3", "example46:step=3", "example32:depth", "grid:rows=x"])
def test_generator_spec_rejects_bad_input(text):
    with pytest.raises(FormatError):
        GeneratorSpec.parse(text)
