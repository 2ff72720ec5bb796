"""Command-line interface: ``qtoric <subcommand> ...``.

Every subcommand prints a JSON report with sorted keys (or writes it to
``--out``).  Exit status is 0 when everything checked passes, 1 when a
validation fails, and 2 on any error.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import os
import sys
import time
from typing import List, Optional

from . import classical, io, scalar
from .chart import (ChartPresentation, bundle_transitions, check_presented_torus, forget_calibration,
                    gluing, torus_presentation, verify_cocycle, verify_round_trip)
from .errors import DiagramFailure, QToricError, SchemaError
from .morphism import chart_family, glue_compatibility, validate_morphism
from .svg import emit_svg

fmt = io.print_scalar


class _Failed(Exception):
    """Raised by a subcommand to signal a validation failure with a report."""

    def __init__(self, results):
        self.results = results


def _digest(paths: List[str]) -> list:
    out = []
    for p in paths:
        with open(p, "rb") as fh:
            out.append({"file": os.path.basename(p), "sha256": hashlib.sha256(fh.read()).hexdigest()})
    return out


def _fan(args, path=None):
    doc = io.load(path or args.fan)
    return doc, doc.fan(close=args.close_fan)


def _cone_id(fan, args) -> int:
    if args.cone is None:
        return fan.maximal_cones()[0]
    if not 0 <= args.cone < len(fan.cones):
        raise SchemaError("/cones", f"no cone with id {args.cone}")
    return args.cone


def cmd_validate(args):
    _, fan = _fan(args)
    report = fan.validate_calibrated()
    results = report.to_json()
    results["cones"] = len(fan.cones)
    if not report.passed:
        raise _Failed(results)
    return results


def cmd_chart(args):
    _, fan = _fan(args)
    cid = _cone_id(fan, args)
    chart = ChartPresentation(fan, cid)
    out = chart.to_json(fmt)
    out["identity_holds"] = chart.check_identity()
    try:
        check_presented_torus(torus_presentation(chart))
        out["presented_torus"] = {"passed": True}
    except DiagramFailure as exc:
        out["presented_torus"] = {"passed": False, "identity": exc.identity}
    out["non_calibrated"] = forget_calibration(chart).to_json(fmt)
    out["stabilizer"] = classical.stabilizer_report(chart).to_json()
    if not out["identity_holds"] or not out["presented_torus"]["passed"]:
        raise _Failed(out)
    return out


def cmd_glue(args):
    _, fan = _fan(args)
    maximal = fan.maximal_cones()
    charts = {c: ChartPresentation(fan, c) for c in maximal}
    transitions, round_trips = [], []
    for s, t in itertools.combinations(maximal, 2):
        fwd, bwd = gluing(charts[s], charts[t])
        transitions += [fwd.to_json(fmt), bwd.to_json(fmt)]
        round_trips.append({"pair": [s, t], "passed": verify_round_trip(charts[s], charts[t])})
    cocycles = [{"triple": list(tr), "passed": verify_cocycle([charts[c] for c in tr])}
                for tr in itertools.combinations(maximal, 3)]
    bundles = [b.to_json() for b in bundle_transitions(fan, charts)]
    out = {"maximal_cones": maximal, "transitions": transitions, "round_trips": round_trips,
           "cocycles": cocycles, "bundle_transitions": bundles}
    ok = all(r["passed"] for r in round_trips + cocycles) and all(b["verified"] for b in bundles)
    out["passed"] = ok
    if not ok:
        raise _Failed(out)
    return out


def cmd_morphism(args):
    src = io.load(args.source)
    tgt = io.load(args.target, src.basis, src.symbols) if src.basis is not None else io.load(args.target)
    with open(args.morphism, "rb") as fh:
        m = io.parse_morphism(fh.read(), src, tgt, close=args.close_fan)
    report = validate_morphism(m)
    out = {"morphism": io.morphism_to_json(m), "validation": report.to_json()}
    if not report.passed:
        raise _Failed(out)
    family = chart_family(m)
    ok, failures = glue_compatibility(m, family)
    out["chart_morphisms"] = [family[c].to_json(fmt) for c in sorted(family)]
    out["glue_compatibility"] = {"passed": ok, "failures": failures}
    if not ok:
        raise _Failed(out)
    return out


def cmd_classical(args):
    doc, fan = _fan(args)
    ctx = classical.ClassicalContext(doc.calibration)
    cid = _cone_id(fan, args)
    cone = fan.cone(cid)
    dual_hb = classical.hilbert_basis(classical.dual_cone(cone))
    relations = classical.toric_relations(dual_hb, args.degree_bound)
    return {
        "cone": cid,
        "hilbert": [list(v) for v in dual_hb],
        "relations": [{"lhs": list(a), "rhs": list(b)} for a, b in relations],
        "degree_bound": args.degree_bound,
        "class_group": classical.class_group(ctx, sorted(fan.indices(cid))).to_json(),
    }


def cmd_gale(args):
    doc, _ = _fan(args)
    return classical.gale_transform(doc.calibration).to_json()


def cmd_git(args):
    _, fan = _fan(args)
    return classical.git_presentation(fan).to_json(fmt)


def cmd_plot(args):
    _, fan = _fan(args)
    return emit_svg(fan)


COMMANDS = {
    "validate": cmd_validate, "chart": cmd_chart, "glue": cmd_glue, "morphism": cmd_morphism,
    "classical": cmd_classical, "gale": cmd_gale, "git": cmd_git, "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-bits", type=int, default=scalar.DEFAULT_MAX_BITS,
                        help="precision cap for the sign oracle")
    common.add_argument("--out", help="write the report here instead of standard output")
    common.add_argument("--close-fan", action="store_true", help="add missing faces before anything else")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the report")

    parser = argparse.ArgumentParser(prog="qtoric", description="Calibrated quantum fan toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "glue", "gale", "git", "plot"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("fan")
    for name in ("chart", "classical"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("fan")
        p.add_argument("--cone", type=int, help="cone id (default: first maximal cone)")
        if name == "classical":
            p.add_argument("--degree-bound", type=int, default=classical.DEFAULT_DEGREE_BOUND)
    p = sub.add_parser("morphism", parents=[common])
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("morphism")
    return parser


def _inputs(args) -> List[str]:
    if args.command == "morphism":
        return [args.source, args.target, args.morphism]
    return [args.fan]


def _emit(text: str, args) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    start = time.perf_counter()
    report = {"command": args.command}
    status = 0
    try:
        report["inputs"] = _digest(_inputs(args))
        with scalar.precision(args.max_bits):
            results = COMMANDS[args.command](args)
        if args.command == "plot":
            _emit(results, args)
            return 0
        report["results"] = results
        report["passed"] = True
    except _Failed as exc:
        report["results"] = exc.results
        report["passed"] = False
        status = 1
    except SchemaError as exc:
        report["error"] = {"type": "SchemaError", "path": exc.path, "message": str(exc)}
        status = 2
    except (QToricError, OSError, ValueError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        status = 2
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 6)
    _emit(io.dumps(report), args)
    if status == 2:
        print(f"qtoric: {report['error']['type']}: {report['error']['message']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
