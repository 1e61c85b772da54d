"""Command-line front end.

Commands: check, sat, eval, translate, suite, trace.  Validity is decided
as unsatisfiability of the negation and the output says which question was
answered, so SAT and VALID never get conflated.  Exit codes: 0 for
VALID/SAT/true/clean, 1 for INVALID/UNSAT/false/inconsistent, 2 for usage
or input errors, 3 when the label cap was hit.
"""

from __future__ import annotations

import argparse
import json
import sys

from .formula import Not, ParseError, cond_to_csl, csl_to_cond, parse, print_formula, size
from .modelext import extract
from .semantics import (
    DistanceMinspaceModel,
    ModelError,
    eval_dist,
    eval_pref,
    model_from_obj,
    model_to_obj,
)
from .suite import CorpusSpec, axiom_schemata, crosscheck, generate_corpus
from .tableau import ResourceLimitExceeded, decide

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR, EXIT_RESOURCE = 0, 1, 2, 3


def _build_parser():
    p = argparse.ArgumentParser(
        prog="csl",
        description="Decision procedures and semantics for the comparative "
        "similarity language.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, model=False):
        sp.add_argument("--label-cap", type=int, default=None,
                        help="label budget for the tableau (default 2^n + slack)")
        sp.add_argument("--trace", action="store_true",
                        help="print one line per rule application")
        sp.add_argument("--json", action="store_true", help="JSON output")
        if model:
            sp.add_argument("--model", required=True, help="model file (JSON)")
            sp.add_argument("--world", required=True, help="world id")

    sp = sub.add_parser("check", help="decide validity")
    sp.add_argument("formula")
    common(sp)

    sp = sub.add_parser("sat", help="decide satisfiability")
    sp.add_argument("formula")
    common(sp)

    sp = sub.add_parser("eval", help="evaluate a formula in a model file")
    sp.add_argument("formula")
    sp.add_argument("--model", required=True)
    sp.add_argument("--world", required=True)
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("translate", help="rewrite between << and ~>")
    sp.add_argument("direction", choices=["to-conditional", "to-csl"])
    sp.add_argument("formula")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("suite", help="run the cross-check suite")
    sp.add_argument("--atoms", default="p,q")
    sp.add_argument("--max-size", type=int, default=4)
    sp.add_argument("--sim-depth", type=int, default=2)
    sp.add_argument("--oracle-bound", type=int, default=3)
    sp.add_argument("--label-cap", type=int, default=None)
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("trace", help="decide satisfiability, printing the trace")
    sp.add_argument("formula")
    sp.add_argument("--label-cap", type=int, default=None)
    sp.add_argument("--json", action="store_true")
    return p


def _parse_formula(text: str):
    f = parse(text)
    return cond_to_csl(f)


def _emit(obj, as_json: bool, lines):
    if as_json:
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def cmd_check(args) -> int:
    f = _parse_formula(args.formula)
    verdict = decide(Not(f), label_cap=args.label_cap, trace=args.trace)
    trace_lines = list(verdict.trace or ())
    if verdict.status == "CLOSED":
        _emit(
            {"command": "check", "status": "VALID", "countermodel": None},
            args.json,
            trace_lines + ["VALID (the tableau for the negation closed)"],
        )
        return EXIT_OK
    report = extract(verdict.open_set, verdict.open_set.root, Not(f))
    obj = model_to_obj(report.model, root=report.root_world)
    _emit(
        {
            "command": "check",
            "status": "INVALID",
            "countermodel": obj,
            "verified": report.verified,
        },
        args.json,
        trace_lines
        + [
            "INVALID (found a countermodel for the negation)",
            f"countermodel (falsifies the formula at {report.root_world}):",
            json.dumps(obj, indent=2, sort_keys=True),
        ],
    )
    return EXIT_NEGATIVE


def cmd_sat(args) -> int:
    f = _parse_formula(args.formula)
    verdict = decide(f, label_cap=args.label_cap, trace=args.trace)
    trace_lines = list(verdict.trace or ())
    if verdict.status == "CLOSED":
        _emit(
            {"command": "sat", "status": "UNSAT", "model": None},
            args.json,
            trace_lines + ["UNSAT (the tableau closed)"],
        )
        return EXIT_NEGATIVE
    report = extract(verdict.open_set, verdict.open_set.root, f)
    obj = model_to_obj(report.model, root=report.root_world)
    _emit(
        {
            "command": "sat",
            "status": "SAT",
            "model": obj,
            "verified": report.verified,
        },
        args.json,
        trace_lines
        + [
            "SAT",
            f"model (satisfies the formula at {report.root_world}):",
            json.dumps(obj, indent=2, sort_keys=True),
        ],
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    f = parse(args.formula)
    with open(args.model, "r", encoding="utf-8") as fh:
        m = model_from_obj(json.load(fh))
    if isinstance(m, DistanceMinspaceModel):
        value = eval_dist(m, args.world, cond_to_csl(f))
    else:
        value = eval_pref(m, args.world, f)
    _emit(
        {"command": "eval", "value": value},
        args.json,
        ["true" if value else "false"],
    )
    return EXIT_OK if value else EXIT_NEGATIVE


def cmd_translate(args) -> int:
    f = parse(args.formula)
    out = csl_to_cond(f) if args.direction == "to-conditional" else cond_to_csl(f)
    text = print_formula(out)
    _emit(
        {"command": "translate", "direction": args.direction, "formula": text},
        args.json,
        [text],
    )
    return EXIT_OK


def cmd_suite(args) -> int:
    atoms = tuple(a for a in args.atoms.split(",") if a)
    spec = CorpusSpec(atoms, args.max_size, args.sim_depth)
    corpus = generate_corpus(spec)
    from .semantics import enumerate_models

    models = list(enumerate_models(atoms, args.oracle_bound))
    reports = []
    for i, f in enumerate(corpus):
        reports.append(
            crosscheck(
                f,
                args.oracle_bound,
                models=models,
                label_cap=args.label_cap,
                name=f"corpus[{i}]",
            )
        )
    bad = [r for r in reports if not r.consistent]
    if args.json:
        print(
            json.dumps(
                {
                    "command": "suite",
                    "checks": [
                        {
                            "name": r.name,
                            "formula": print_formula(r.formula),
                            "verdict": r.verdict,
                            "oracle": r.oracle,
                            "consistent": r.consistent,
                            "millis": round(r.millis, 1),
                            "detail": r.detail,
                        }
                        for r in reports
                    ],
                    "inconsistencies": len(bad),
                },
                indent=2,
                sort_keys=True,
            )
        )
    else:
        for r in reports:
            print(r.line())
        print(
            f"suite: {len(reports)} checks, {len(bad)} inconsistencies, "
            f"{len(axiom_schemata())} schemata available"
        )
    return EXIT_OK if not bad else EXIT_NEGATIVE


def cmd_trace(args) -> int:
    f = _parse_formula(args.formula)
    verdict = decide(f, label_cap=args.label_cap, trace=True)
    if args.json:
        print(
            json.dumps(
                {
                    "command": "trace",
                    "status": verdict.status,
                    "trace": list(verdict.trace),
                },
                indent=2,
                sort_keys=True,
            )
        )
    else:
        for line in verdict.trace:
            print(line)
        print(verdict.status)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return cmd_check(args)
        if args.command == "sat":
            return cmd_sat(args)
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "translate":
            return cmd_translate(args)
        if args.command == "suite":
            return cmd_suite(args)
        return cmd_trace(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except ResourceLimitExceeded as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ModelError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
