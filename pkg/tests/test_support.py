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
import unittest
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lipfree.base.free import FreeElement, combine, lipschitz_constant, molecule, norm, pairing
from lipfree.errors import PreconditionError
from lipfree.molecules.support import (
    bisector_kernel,
    check_f_mu_slice_property,
    f_mu,
    lambda_max,
    mu_set,
    support_function,
)
from lipfree.spaces import gen_example46, gen_grid, gen_random

from tests.helpers import random_unit_combination


HALF = Fraction(1, 2)
CORNERS = [("x1", "y1", HALF), ("x2", "y2", HALF)]


class MuSetTestCase(unittest.TestCase):
    def setUp(self):
        self.space = gen_example46(2)
        self.mu = combine(self.space, CORNERS)

    def test_molecule_splits_off_itself(self):
        m = molecule(self.space, "x1", "y1")
        lam, residual = lambda_max(self.space, m, "x1", "y1")
        self.assertEqual(lam, 1)
        self.assertEqual(residual, m)
        self.assertIn(("x1", "y1"), mu_set(self.space, m))
        self.assertNotIn(("y1", "x1"), mu_set(self.space, m))

    def test_two_column_members(self):
        result = mu_set(self.space, self.mu)
        self.assertEqual(
            result.pairs(),
            [("x1", "y1"), ("x1", "y2"), ("x2", "y1"), ("x2", "y2")],
        )
        for w in result.members:
            self.assertEqual(w.lam, HALF)
            self.assertEqual(norm(self.space, w.residual).value, 1)
            self.assertEqual(
                w.residual.scale(1 - w.lam) + molecule(self.space, w.u, w.v).scale(w.lam), self.mu
            )
        self.assertNotIn(("x1", "x2"), result)
        self.assertIsNone(result.witness("x1", "x2"))

    def test_presentation_must_expand_to_the_masses(self):
        m = molecule(self.space, "x1", "y1")
        forged = FreeElement(dict(m.masses), [("x1", "y2", 1)])
        with self.assertRaisesRegex(PreconditionError, "does not expand"):
            mu_set(self.space, forged)
        with self.assertRaises(PreconditionError):
            support_function(self.space, forged)
        with self.assertRaises(PreconditionError):
            f_mu(self.space, forged)
        self.assertEqual(mu_set(self.space, FreeElement(dict(m.masses))).pairs(), mu_set(self.space, m).pairs())

    def test_excluded_pairs_carry_their_pairing(self):
        result = mu_set(self.space, self.mu)
        for u, v, value in result.excluded:
            self.assertLess(value, 1)
            self.assertEqual(value, pairing(result.potential, molecule(self.space, u, v)))

    def test_all_pairs_sweeps_the_space(self):
        result = mu_set(self.space, self.mu, all_pairs=True)
        seen = len(result.members) + len(result.excluded) + len(result.rejected)
        self.assertEqual(seen, 10 * 9)

    def test_non_unit_element_rejected(self):
        with self.assertRaises(PreconditionError):
            mu_set(self.space, molecule(self.space, "x1", "y1").scale(2))


class SupportFunctionTestCase(unittest.TestCase):
    def test_all_cross_pairs_members(self):
        space = gen_example46(2)
        g = support_function(space, CORNERS)
        self.assertEqual(pairing(g, combine(space, CORNERS)), 1)
        for x, y in [("x1", "y2"), ("x2", "y1")]:
            self.assertEqual(pairing(g, molecule(space, x, y)), 1)

    def test_weights_must_sum_to_one(self):
        space = gen_example46(2)
        with self.assertRaises(PreconditionError):
            support_function(space, [("x1", "y1", HALF)])
        with self.assertRaises(PreconditionError):
            support_function(space, [])

    def test_line_with_a_gap(self):
        # Points 0 < 1 < 2 < 3 on a line, mu = (m_10 + m_32) / 2. Neither cross molecule
        # m_12 nor m_30 splits off mu.
        line = gen_grid(1, 4)
        terms = [("g0_1", "g0_0", HALF), ("g0_3", "g0_2", HALF)]
        mu = combine(line, terms)
        members = set(mu_set(line, mu).pairs())
        self.assertNotIn(("g0_1", "g0_2"), members)
        self.assertNotIn(("g0_3", "g0_0"), members)
        g = support_function(line, terms)
        self.assertEqual(pairing(g, mu), 1)
        self.assertLessEqual(lipschitz_constant(line, g), 1)
        for x, y in [("g0_1", "g0_2"), ("g0_3", "g0_0")]:
            self.assertEqual(pairing(g, molecule(line, x, y)) == 1, (x, y) in members)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_support_function_separates_members(seed):
    rng = random.Random(seed)
    space = gen_random(rng.randint(3, 6), seed=seed)
    terms, _ = random_unit_combination(space, rng, max_terms=3)
    mu = combine(space, terms)
    members = set(mu_set(space, mu).pairs())

    g = support_function(space, terms)
    assert lipschitz_constant(space, g) <= 1
    assert pairing(g, mu) == 1
    for x, _, _ in terms:
        for _, y, _ in terms:
            if x != y:
                assert (pairing(g, molecule(space, x, y)) == 1) == ((x, y) in members)


class FMuTestCase(unittest.TestCase):
    def test_kernel_vanishes_at_midpoint(self):
        line = gen_grid(1, 3)
        k = bisector_kernel(line, "g0_0", "g0_2")
        self.assertEqual(k, {"g0_0": 1, "g0_1": 0, "g0_2": -1})
        with self.assertRaises(PreconditionError):
            bisector_kernel(line, "g0_0", "g0_0")

    def test_two_column_functional(self):
        space = gen_example46(2)
        result = f_mu(space, CORNERS)
        self.assertEqual(pairing(result.f, combine(space, CORNERS)), 1)
        self.assertLessEqual(lipschitz_constant(space, result.f), 1)
        self.assertGreater(result.delta, 0)
        self.assertLessEqual(result.delta, 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_kernel_identity(seed):
    rng = random.Random(seed)
    space = gen_random(rng.randint(2, 7), seed=seed)
    x, y = rng.sample(sorted(space.points), 2)
    k = bisector_kernel(space, x, y)
    d = space.d
    for p in space.points:
        assert d(x, y) / 2 - k[p] == d(x, y) * d(x, p) / (d(x, p) + d(y, p))
    assert k[x] == d(x, y) / 2
    assert k[y] == -d(x, y) / 2


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_f_mu_slices(seed):
    rng = random.Random(seed)
    space = gen_random(rng.randint(3, 6), seed=seed)
    terms, _ = random_unit_combination(space, rng, max_terms=3)
    mu = combine(space, terms)

    result = f_mu(space, terms)
    assert lipschitz_constant(space, result.f) <= 1
    assert pairing(result.f, mu) == 1
    assert 0 < result.delta <= 1
    alpha = result.delta / 2
    assert check_f_mu_slice_property(space, terms, result.f, alpha) == []
