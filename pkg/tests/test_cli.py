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

import pytest

from lipfree.cli import EXIT_FALSE, EXIT_OK, EXIT_USAGE, main


def _run(tmp_path, name, *argv):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def _json(tmp_path, *argv):
    code, out = _run(tmp_path, "report.json", *argv)
    return code, (json.loads(out.read_text()) if out.exists() else None)


@pytest.fixture
def space_file(tmp_path):
    code, out = _run(tmp_path, "comb.json", "gen", "--spec", "example32:depth=1")
    assert code == EXIT_OK
    return out


def test_gen_then_validate(tmp_path, space_file):
    doc = json.loads(space_file.read_text())
    assert len(doc["space"]["points"]) == 5
    assert doc["manifest"]["command"] == "gen"

    space_only = tmp_path / "space_only.json"
    space_only.write_text(json.dumps(doc["space"]))
    code, report = _json(tmp_path, "validate", "--space", str(space_only))
    assert code == EXIT_OK
    assert report["validation"]["ok"] is True
    assert list(report["manifest"]["artifact_hashes"]) == ["space_only.json"]


def test_validate_reports_triangle(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps({"points": ["a", "b", "c"], "base": "a",
                    "dist": [["0", "1", "5"], ["1", "0", "1"], ["5", "1", "0"]]})
    )
    code, report = _json(tmp_path, "validate", "--space", str(bad))
    assert code == EXIT_FALSE
    assert report["validation"]["axiom"] == "triangle"


def test_usage_errors(tmp_path):
    assert _json(tmp_path, "validate", "--space", str(tmp_path / "missing.json"))[0] == EXIT_USAGE
    assert _json(tmp_path, "delta-profile", "--alphas", "")[0] == EXIT_USAGE
    assert _json(tmp_path, "norm", "--generator", "example32:depth=1", "--terms", "x,y,0.5")[0] == EXIT_USAGE
    assert _json(tmp_path, "pairnorm", "--generator", "example32:depth=1", "--first", "x", "--second", "x,y")[0] == EXIT_USAGE
    assert main(["no-such-verb"]) == EXIT_USAGE


def _norm_space(tmp_path):
    code, out = _run(tmp_path, "columns.json", "gen", "--spec", "example46:k=2")
    assert code == EXIT_OK
    path = tmp_path / "columns_space.json"
    path.write_text(json.dumps(json.loads(out.read_text())["space"]))
    return path


def test_norm_of_corner_combination(tmp_path):
    path = _norm_space(tmp_path)
    code, report = _json(tmp_path, "norm", "--space", str(path), "--terms", "x1,y1,1/2;x2,y2,1/2")
    assert code == EXIT_OK
    assert report["norm"]["value"] == "1/1"
    assert report["decimal_display"]["norm"] == "1.000000000"

    code, first = _json(
        tmp_path, "norm", "--space", str(path), "--terms", "x1,y1,1/2;x2,y2,1/2",
        "--solver.pivot_rule", "first",
    )
    assert code == EXIT_OK
    assert first["norm"]["value"] == "1/1"


def test_pairnorm_and_denting(tmp_path):
    code, report = _json(
        tmp_path, "pairnorm", "--generator", "example46:k=2", "--first", "x1,y1", "--second", "x2,y2"
    )
    assert code == EXIT_OK
    assert report["pair_sum_norm"]["value"] == "2/1"

    assert _json(tmp_path, "denting", "--generator", "example32:depth=1", "--pair", "x,y")[0] == EXIT_OK
    assert _json(tmp_path, "denting", "--generator", "example32:depth=1", "--pair", "x,s1_1")[0] == EXIT_FALSE
    code, report = _json(tmp_path, "denting", "--generator", "example32:depth=1")
    assert "x->y" in report["denting_set"]


def test_daugavet_with_and_without_exclusion(tmp_path):
    gen = ("--generator", "example32:depth=2", "--terms", "x,y")
    code, report = _json(tmp_path, "daugavet", *gen)
    assert code == EXIT_FALSE
    assert report["daugavet"]["offending"] == ["x", "y", "0/1"]

    code, report = _json(tmp_path, "daugavet", *gen, "--exclude", "x,y;y,x", "--condition_iii")
    assert code == EXIT_OK
    assert report["daugavet"]["fails_only_by_excluded"] is True
    assert "condition_iii" in report


def test_mu_set_alias(tmp_path):
    args = ("--generator", "example46:k=2", "--terms", "x1,y1,1/2;x2,y2,1/2")
    code, a = _json(tmp_path, "mu-set", *args)
    assert code == EXIT_OK
    code, b = _json(tmp_path, "museit", *args)
    assert code == EXIT_OK
    assert a["mu_set"] == b["mu_set"]
    assert [(m["u"], m["v"]) for m in a["mu_set"]["members"]] == [
        ("x1", "y1"), ("x1", "y2"), ("x2", "y1"), ("x2", "y2"),
    ]


def test_descent(tmp_path):
    code, report = _json(
        tmp_path, "descent", "--generator", "example32:depth=1", "--pair", "x,s1_1",
        "--r", "3/5", "--s", "3/10", "--delta", "1/100",
    )
    assert code == EXIT_OK
    assert report["denting_pair"] == "s1_0->s1_1"
    assert report["d_ux"] == "1/2"
    assert report["steps"] == [{"pair": "s1_0->s1_1", "r_prime": "1/2", "s_prime": "0/1"}]


def test_witness_with_function(tmp_path):
    f = tmp_path / "f.json"
    # f = -a on the depth-1 comb
    f.write_text(json.dumps({"values": {"x": "0", "y": "-1", "s1_0": "0", "s1_1": "-1/2", "s1_2": "-1"}}))
    code, report = _json(
        tmp_path, "witness", "--generator", "example32:depth=1", "--terms", "x,y",
        "--function", str(f), "--alpha", "1/4", "--eps", "1/4",
    )
    assert code == EXIT_OK
    assert report["witness"]["found"] is True
    assert (report["witness"]["u"], report["witness"]["v"]) == ("s1_0", "s1_1")
    assert "f.json" in report["manifest"]["artifact_hashes"]


def test_report_example32(tmp_path):
    code, report = _json(tmp_path, "report-example32", "--depth", "3")
    assert code == EXIT_OK
    assert report["example32"]["denting_set_matches_prediction"] is True


def test_delta_profile_csv(tmp_path):
    code, out = _run(tmp_path, "profile.csv", "delta-profile", "--values", "2,3", "--slice", "balanced")
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# manifest ")
    assert json.loads(lines[0][len("# manifest "):])["command"] == "delta-profile"
    assert [line.split(",")[4] for line in lines[2:]] == ["1/4", "1/8"]


def test_reruns_are_byte_identical(tmp_path):
    argv = ("report-example32", "--depth", "2")
    _, first = _run(tmp_path, "a.json", *argv)
    _, second = _run(tmp_path, "b.json", *argv)
    assert first.read_bytes() == second.read_bytes()


def test_events_log(tmp_path):
    runs = tmp_path / "runs"
    code, _ = _run(
        tmp_path, "gen.json", "gen", "--spec", "grid:rows=2,cols=2",
        "--run.save_events", "--run.dir", str(runs),
    )
    assert code == EXIT_OK
    log = (runs / "events.log").read_text()
    assert "report written" in log


def test_witness_from_a_given_start(tmp_path):
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"values": {"x": "0", "y": "-1", "s1_0": "0", "s1_1": "-1/2", "s1_2": "-1"}}))
    code, report = _json(
        tmp_path, "witness", "--generator", "example32:depth=1", "--terms", "x,y",
        "--function", str(f), "--start", "s1_0,s1_1",
    )
    assert code == EXIT_OK
    assert report["witness"]["path"] == [["s1_0", "s1_1"]]
    assert report["witness"]["starts_tried"] == 1
