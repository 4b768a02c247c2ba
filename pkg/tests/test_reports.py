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


import json
import unittest
from fractions import Fraction

import pytest

from lipfree.errors import FormatError, PreconditionError
from lipfree.reports import RunManifest
from lipfree.reports.example32 import example32_report, predicted_denting_set, z_witnesses
from lipfree.reports.profile import CSV_COLUMNS, delta_profile, parse_terms, profile_csv
from lipfree.spaces import GeneratorSpec, gen_example32


CORNER_TERMS = "x1,y1,1/2;x2,y2,1/2"


class Example32ReportTestCase(unittest.TestCase):
    def test_depth_four(self):
        body, ok = example32_report(4)
        self.assertTrue(ok)
        self.assertEqual(body["points"], 2**5 + 4)
        self.assertTrue(body["denting_set_matches_prediction"])
        self.assertEqual(len(body["denting_set"]), len(predicted_denting_set(4)))
        self.assertEqual(body["verdict"]["excluded"], ["x->y", "y->x"])
        self.assertTrue(body["verdict"]["fails_only_by_excluded"])
        self.assertEqual(body["verdict"]["below_two"], {"x->y": "0/1"})
        self.assertEqual(body["distances_to_m_xy"]["y->x"], "2/1")
        self.assertEqual([w["z"] for w in body["z_witnesses"]], ["s3_4", "s4_8"])

    def test_z_witness_distances(self):
        comb = gen_example32(4)
        rows = z_witnesses(comb, 4)
        self.assertEqual(rows[0].d_xz, Fraction(5, 8))
        self.assertEqual(rows[1].d_yz, Fraction(9, 16))
        self.assertTrue(all(w.ok for w in rows))

    def test_shallow_comb_has_no_witnesses(self):
        body, ok = example32_report(2)
        self.assertTrue(ok)
        self.assertEqual(body["z_witnesses"], [])


class ProfileTestCase(unittest.TestCase):
    def test_balanced_profile_tracks_the_step(self):
        rows = delta_profile(
            GeneratorSpec.parse("example46:k=2"), "k", [2, 3, 4], parse_terms(CORNER_TERMS),
            "balanced", [Fraction(1, 10)],
        )
        self.assertEqual([r.space_id for r in rows], ["example46:k=2", "example46:k=3", "example46:k=4"])
        self.assertEqual([r.min_length for r in rows], [Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)])
        self.assertEqual([r.step for r in rows], [r.min_length for r in rows])
        self.assertEqual({r.witness for r in rows}, {("L1", "L2")})

    def test_half_slope_profile_stays_at_one(self):
        rows = delta_profile(
            GeneratorSpec.parse("example46:k=2"), "k", [2, 3], parse_terms("x1,y1"),
            "half-slope", [Fraction(1, 10)],
        )
        self.assertEqual({r.min_length for r in rows}, {1})

    def test_bad_inputs(self):
        family = GeneratorSpec.parse("example46:k=2")
        with self.assertRaises(PreconditionError):
            delta_profile(family, "k", [2], parse_terms(CORNER_TERMS), "balanced", [])
        with self.assertRaises(FormatError):
            delta_profile(family, "k", [2], parse_terms(CORNER_TERMS), "diagonal", [Fraction(1, 10)])
        with self.assertRaises(PreconditionError):
            delta_profile(
                GeneratorSpec.parse("example32:depth=1"), "depth", [1], parse_terms("x,y"),
                "balanced", [Fraction(1, 10)],
            )

    def test_csv_layout(self):
        rows = delta_profile(
            GeneratorSpec.parse("example46:k=2"), "k", [2], parse_terms(CORNER_TERMS),
            "balanced", [Fraction(1, 10)],
        )
        manifest = RunManifest.build("delta-profile", {}, {"values": "2"}).to_dict()
        lines = profile_csv(rows, manifest).splitlines()
        self.assertTrue(lines[0].startswith("# manifest "))
        self.assertEqual(json.loads(lines[0][len("# manifest "):])["command"], "delta-profile")
        self.assertEqual(lines[1], ",".join(CSV_COLUMNS))
        self.assertEqual(lines[2], "example46:k=2,1/4,balanced@1/10,1/10,1/4,1,4,L1->L2")


@pytest.mark.parametrize(
    "text, expected",
    [
        ("x,y", [("x", "y", Fraction(1))]),
        (CORNER_TERMS, [("x1", "y1", Fraction(1, 2)), ("x2", "y2", Fraction(1, 2))]),
        (" a , b , 3 ; ", [("a", "b", Fraction(3))]),
    ],
)
def test_parse_terms(text, expected):
    assert parse_terms(text) == expected


@pytest.mark.parametrize("bad", ["", "x", "x,y,1,2", "x,y,0.5"])
def test_parse_terms_rejects(bad):
    with pytest.raises(FormatError):
        parse_terms(bad)


def test_manifest_hashes_inputs(tmp_path):
    path = tmp_path / "space.json"
    path.write_text("{}")
    a = RunManifest.build("norm", {"space_file": str(path)}, {"terms": "x,y"}, inputs=[str(path)])
    b = RunManifest.build("norm", {"space_file": str(path)}, {"terms": "x,y"}, inputs=[str(path)])
    assert a.digest == b.digest
    assert list(a.to_dict()["artifact_hashes"]) == ["space.json"]
    path.write_text("{ }")
    c = RunManifest.build("norm", {"space_file": str(path)}, {"terms": "x,y"}, inputs=[str(path)])
    assert c.digest != a.digest
