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


import sys
import argparse
import traceback
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import bittensor as bt

from lipfree.base.free import FreeElement, combine, norm, require_unit_norm
from lipfree.base.metric import FiniteMetricSpace, validate
from lipfree.classify.daugavet import (
    condition_iii_check,
    daugavet_witness_search,
    denting_set,
    is_daugavet,
    is_denting,
)
from lipfree.classify.descent import descent_path
from lipfree.classify.slices import Slice
from lipfree.errors import FormatError, LipfreeError
from lipfree.molecules.calculus import pair_sum_norm
from lipfree.molecules.support import mu_set
from lipfree.protocol import (
    certificate_to_dict,
    format_rational,
    load_element,
    load_function,
    load_space,
    parse_rational,
    space_to_dict,
    to_wire,
)
from lipfree.reports.example32 import example32_report
from lipfree.reports.manifest import RunManifest
from lipfree.reports.profile import delta_profile, parse_terms, profile_csv
from lipfree.spaces import GeneratorSpec
from lipfree.utils.config import add_args, check_config, close_events, config, log_event
from lipfree.utils.misc import canonical_json, decimal_display, pair_key


EXIT_OK, EXIT_FALSE, EXIT_USAGE = 0, 1, 2


def _pair(text: str) -> Tuple[str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise FormatError(f"expected a pair 'u,v', got {text!r}")
    return parts[0], parts[1]


def _pairs(text: Optional[str]) -> List[Tuple[str, str]]:
    return [_pair(chunk) for chunk in (text or "").split(";") if chunk.strip()]


def _rationals(text: Optional[str]) -> List[Fraction]:
    return [parse_rational(t) for t in (text or "").split(",") if t.strip()]


def _space(config: "bt.Config") -> Tuple[FiniteMetricSpace, List[str]]:
    """The input space and the input files to hash."""
    if config.space:
        space = load_space(config.space).check()
        return space, [config.space]
    if config.generator:
        space = GeneratorSpec.parse(config.generator).build(max_points=config.gen.max_points)
        return space, []
    raise FormatError("one of --space or --generator is required")


def _element(config: "bt.Config", space: FiniteMetricSpace) -> Tuple[FreeElement, List[str]]:
    if config.element:
        return load_element(space, config.element), [config.element]
    if config.terms:
        return combine(space, parse_terms(config.terms)), []
    raise FormatError("one of --element or --terms is required")


def _with_display(result: Dict[str, Any], **values: Fraction) -> Dict[str, Any]:
    result["decimal_display"] = {k: decimal_display(v) for k, v in values.items()}
    return result


def cmd_validate(config):
    if config.space:
        space, inputs = load_space(config.space), [config.space]
    else:
        space, inputs = _space(config)
    report = validate(space)
    if not report.ok:
        bt.logging.warning(f"{report.axiom} violation at {report.witnesses}: {report.message}")
    return {"validation": to_wire(report)}, (EXIT_OK if report.ok else EXIT_FALSE), inputs


def cmd_report_example32(config):
    body, ok = example32_report(config.depth)
    return {"example32": body}, (EXIT_OK if ok else EXIT_FALSE), []


def cmd_norm(config):
    space, inputs = _space(config)
    el, more = _element(config, space)
    cert = norm(space, el)
    return _with_display({"norm": certificate_to_dict(cert)}, norm=cert.value), EXIT_OK, inputs + more


def cmd_pairnorm(config):
    space, inputs = _space(config)
    (x, y), (u, v) = _pair(config.first), _pair(config.second)
    report = pair_sum_norm(space, x, y, u, v)
    result = {"pair_sum_norm": to_wire(report), "pairs": [pair_key(x, y), pair_key(u, v)]}
    return _with_display(result, value=report.value), EXIT_OK, inputs


def cmd_denting(config):
    space, inputs = _space(config)
    if config.pair:
        u, v = _pair(config.pair)
        dent = is_denting(space, u, v)
        return {"pair": pair_key(u, v), "is_denting": dent}, (EXIT_OK if dent else EXIT_FALSE), inputs
    pairs = denting_set(space)
    return {"denting_set": [pair_key(u, v) for u, v in pairs]}, EXIT_OK, inputs


def cmd_daugavet(config):
    space, inputs = _space(config)
    el, more = _element(config, space)
    verdict = is_daugavet(space, el, exclude=_pairs(config.exclude))
    result = {"daugavet": to_wire(verdict)}
    if config.condition_iii:
        result["condition_iii"] = to_wire(condition_iii_check(space, el))
    code = EXIT_OK if verdict.is_daugavet else EXIT_FALSE
    return result, code, inputs + more


def cmd_mu_set(config):
    space, inputs = _space(config)
    el, more = _element(config, space)
    members = mu_set(space, el, all_pairs=config.all_pairs)
    return {"mu_set": to_wire(members)}, EXIT_OK, inputs + more


def cmd_witness(config):
    space, inputs = _space(config)
    el, more = _element(config, space)
    if config.function:
        slc = Slice.checked(space, load_function(space, config.function), parse_rational(config.alpha), "function")
        more.append(config.function)
    else:
        slc = Slice(require_unit_norm(space, el).potential, parse_rational(config.alpha), "potential")
    start = _pair(config.start) if config.start else None
    report = daugavet_witness_search(space, el, slc, parse_rational(config.eps), start=start)
    result = _with_display({"witness": to_wire(report)}, distance=report.distance, length=report.length)
    return result, (EXIT_OK if report.found else EXIT_FALSE), inputs + more


def cmd_descent(config):
    space, inputs = _space(config)
    u, v = _pair(config.pair)
    r, s = parse_rational(config.r), parse_rational(config.s)
    steps = descent_path(space, u, v, r, s, parse_rational(config.delta))
    x, y = (steps[-1].x, steps[-1].y) if steps else (u, v)
    result = {
        "start": pair_key(u, v),
        "denting_pair": pair_key(x, y),
        "steps": [
            {"pair": pair_key(t.x, t.y), "r_prime": format_rational(t.r_prime), "s_prime": format_rational(t.s_prime)}
            for t in steps
        ],
        "d_ux": format_rational(space.d(u, x)),
        "d_vy": format_rational(space.d(v, y)),
    }
    return result, EXIT_OK, inputs


def cmd_gen(config):
    spec = GeneratorSpec.parse(config.spec)
    space = spec.build(max_points=config.gen.max_points)
    return {"space": space_to_dict(space)}, EXIT_OK, []


def cmd_delta_profile(config):
    alphas = _rationals(config.alphas)
    if not alphas:
        raise argparse.ArgumentTypeError("--alphas needs at least one value")
    values = [int(v) for v in config["values"].split(",") if v.strip()]
    rows = delta_profile(
        GeneratorSpec.parse(config.family),
        config.param,
        values,
        parse_terms(config.terms),
        config.slice,
        alphas,
        max_points=config.gen.max_points,
    )
    return rows, EXIT_OK, []


COMMANDS = {
    "validate": cmd_validate,
    "report-example32": cmd_report_example32,
    "delta-profile": cmd_delta_profile,
    "norm": cmd_norm,
    "pairnorm": cmd_pairnorm,
    "denting": cmd_denting,
    "daugavet": cmd_daugavet,
    "mu-set": cmd_mu_set,
    "museit": cmd_mu_set,
    "witness": cmd_witness,
    "descent": cmd_descent,
    "gen": cmd_gen,
}


def _space_args(parser):
    parser.add_argument("--space", type=str, default=None, help="Space JSON file.")
    parser.add_argument("--generator", type=str, default=None, help="Generator spec, e.g. example46:k=3.")


def _element_args(parser):
    parser.add_argument("--element", type=str, default=None, help="Element JSON file.")
    parser.add_argument("--terms", type=str, default=None, help="Molecule terms, e.g. 'x1,y1,1/2;x2,y2,1/2'.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lipfree", description="Exact geometry of Lipschitz-free spaces over finite metric spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="Check the metric axioms of a space file.")
    _space_args(p)

    p = sub.add_parser("report-example32", help="Denting classification and distances on the dyadic comb.")
    p.add_argument("--depth", type=int, default=3)

    p = sub.add_parser("delta-profile", help="Shortest in-slice molecule along a generator family (CSV).")
    p.add_argument("--family", type=str, default="example46:k=2")
    p.add_argument("--param", type=str, default="k")
    p.add_argument("--values", type=str, default="2,3,4")
    p.add_argument("--terms", type=str, default="x1,y1,1/2;x2,y2,1/2")
    p.add_argument("--slice", type=str, default="balanced", help="balanced, half-slope or family.")
    p.add_argument("--alphas", type=str, default="1/10")

    p = sub.add_parser("norm", help="Free-space norm with its certificate.")
    _space_args(p)
    _element_args(p)

    p = sub.add_parser("pairnorm", help="Closed form of ||m_xy + m_uv||.")
    _space_args(p)
    p.add_argument("--first", type=str, default="", help="x,y")
    p.add_argument("--second", type=str, default="", help="u,v")

    p = sub.add_parser("denting", help="Denting molecules, or a single pair test.")
    _space_args(p)
    p.add_argument("--pair", type=str, default=None, help="u,v")

    p = sub.add_parser("daugavet", help="Daugavet-point test against every denting molecule.")
    _space_args(p)
    _element_args(p)
    p.add_argument("--exclude", type=str, default=None, help="Pairs left out, e.g. 'x,y;y,x'.")
    p.add_argument("--condition_iii", action="store_true", default=False)

    p = sub.add_parser("mu-set", aliases=["museit"], help="Molecules that split off the element.")
    _space_args(p)
    _element_args(p)
    p.add_argument("--all_pairs", action="store_true", default=False)

    p = sub.add_parser("witness", help="Far molecule inside a slice.")
    _space_args(p)
    _element_args(p)
    p.add_argument("--function", type=str, default=None, help="Slice functional JSON; default is the norming potential.")
    p.add_argument("--alpha", type=str, default="1/4")
    p.add_argument("--eps", type=str, default="1/4")
    p.add_argument("--start", type=str, default=None, help="Walk from this in-slice pair only: u,v")

    p = sub.add_parser("descent", help="Denting pair inside two balls.")
    _space_args(p)
    p.add_argument("--pair", type=str, default="", help="u,v")
    p.add_argument("--r", type=str, default="0")
    p.add_argument("--s", type=str, default="0")
    p.add_argument("--delta", type=str, default="1/100")

    p = sub.add_parser("gen", help="Write a generated space.")
    p.add_argument("--spec", type=str, default="example32:depth=1")

    for choice in set(sub.choices.values()):
        add_args(choice)
        bt.logging.add_args(choice)
    return parser


def _emit(config, text: str):
    if config.out:
        with open(config.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cfg = config(build_parser(), argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        check_config(cfg)
        bt.logging(config=cfg, logging_dir=cfg.run.full_path)
        result, code, inputs = COMMANDS[cfg.command](cfg)
        params = {
            k: v
            for k, v in sorted(cfg.items())
            if isinstance(v, (str, int)) and k not in ("command", "out")
        }
        provenance = {"space_file": cfg.get("space")} if cfg.get("space") else {}
        if cfg.get("generator"):
            provenance["generator"] = cfg.generator
        manifest = RunManifest.build(cfg.command, provenance, params, inputs=inputs)

        if cfg.command == "delta-profile":
            _emit(cfg, profile_csv(result, manifest.to_dict()))
        else:
            _emit(cfg, canonical_json({"manifest": manifest.to_dict(), **result}))
        log_event(cfg, "report written", command=cfg.command, manifest=manifest.digest, exit_code=code)
        return code
    except (LipfreeError, argparse.ArgumentTypeError, ValueError) as e:
        bt.logging.error(f"{cfg.command}: {e}")
        return EXIT_USAGE
    except Exception:
        bt.logging.error(traceback.format_exc())
        raise
    finally:
        close_events()


if __name__ == "__main__":
    sys.exit(main())
