"""Command line front end: ``hahnci run`` and ``hahnci verify``.

Exit codes: 0 all tasks succeeded, 1 some task failed (or a verified report
differs), 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys

from .scenario import (ScenarioError, load_scenario, mask_timing, render_structured, render_text,
                       run_scenario)

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None
    except OSError as e:
        raise ScenarioError(path, e.strerror or str(e)) from None


def _precision(text):
    if text is None:
        return None
    return [p.strip() for p in text.split(",")] if "," in text else text


def build_parser():
    ap = argparse.ArgumentParser(prog="hahnci", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "run a scenario file"), ("verify", "re-check an existing report")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("path")
        p.add_argument("--seed", type=int)
        p.add_argument("--precision", help="precision cap, e.g. 5/2 or 1,0 for rank 2")
        p.add_argument("--horizon", type=int)
        p.add_argument("--report", choices=("text", "structured"), default="structured")
        p.add_argument("--tasks", help="comma-separated task ids or op names")
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        p.add_argument("--mask-timing", action="store_true", help="replace timing fields by null")
    return ap


def _emit(report, args):
    if args.mask_timing:
        report = mask_timing(report)
    text = render_text(report) if args.report == "text" else render_structured(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    only = [s.strip() for s in args.tasks.split(",")] if args.tasks else None
    try:
        doc = _read_json(args.path)
        if args.command == "verify":
            if not isinstance(doc, dict) or "inputs" not in doc:
                raise ScenarioError("inputs", "not a report: no echoed inputs")
            sc = load_scenario(doc["inputs"], args.seed, _precision(args.precision), args.horizon)
        else:
            sc = load_scenario(doc, args.seed, _precision(args.precision), args.horizon)
    except ScenarioError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    report = run_scenario(sc, only)
    if args.command == "verify":
        same = mask_timing(report) == mask_timing(doc)
        if args.output or args.report == "text":
            _emit(report, args)
        print("verify: " + ("evidence reproduced" if same else "report differs"), file=sys.stderr)
        return EXIT_OK if same else EXIT_FAIL
    _emit(report, args)
    return EXIT_OK if report["summary"]["failed"] == 0 else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
