"""Command-line front door.

Commands: analyze (per-node interval dump), optimize (rewritten program
plus report), instrument (program with interval assumptions), contract
(one constraint/box contraction), check (soundness and equivalence
pipelines over exhaustive concrete execution).

Exit codes: 0 success/clean, 1 property violation found, 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .absint import AnalysisConfig, analyze_program
from .contractor import Constraint, box_render, contract_fixpoint, parse_box
from .instrument import instrument_program
from .lang import Assert, BoolLit, ParseError, parse_condition, parse_program, \
    program_to_source, expr_to_source, walk_stmts
from .optimize import optimize_program
from .oracle import (
    EnumerationCapError,
    UnboundedNondetError,
    check_equivalence,
    check_soundness,
)


def _read_program(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_program(handle.read())


def _emit(text: str, args) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _config(args) -> AnalysisConfig:
    return AnalysisConfig(
        widening_delay=args.widening_delay,
        narrowing_passes=args.narrowing_passes,
        interval_arith=not args.no_interval_arith,
        use_contractors=not args.no_contractors,
    )


def _state_json(state) -> "dict[str, str]":
    return {name: iv.render() for name, iv in state.env}


def _state_text(state) -> str:
    if state.is_bottom:
        return "bottom"
    return ", ".join("%s:%s" % (name, iv.render()) for name, iv in state.env) or "(no variables)"


def _nodes_json(analyses) -> "list[dict]":
    nodes = []
    for fname in sorted(analyses):
        fa = analyses[fname]
        for nid in sorted(fa.cfg.nodes):
            nodes.append({
                "id": "%s:%d" % (fname, nid),
                "stmt": fa.cfg.nodes[nid].describe(),
                "before": _state_json(fa.result.before[nid]),
                "after": _state_json(fa.result.after[nid]),
            })
    return nodes


def _document(program_source: str, config: AnalysisConfig, analyses, report) -> str:
    doc = {
        "program": program_source,
        "config": dataclasses.asdict(config),
        "nodes": _nodes_json(analyses),
        "report": report,
    }
    return json.dumps(doc, indent=2)


def cmd_analyze(args) -> int:
    prog = _read_program(args.input)
    config = _config(args)
    analyses = analyze_program(prog, config)
    if args.format == "json":
        report = {
            fname: {"iterations": fa.result.iterations,
                    "widened_nodes": sorted(fa.result.widened_nodes)}
            for fname, fa in sorted(analyses.items())
        }
        _emit(_document(program_to_source(prog), config, analyses, report), args)
        return 0
    lines = []
    for fname in sorted(analyses):
        fa = analyses[fname]
        lines.append("fn %s (%d iterations)" % (fname, fa.result.iterations))
        for nid in sorted(fa.cfg.nodes):
            lines.append("  [%d] %s" % (nid, fa.cfg.nodes[nid].describe()))
            lines.append("      before: %s" % _state_text(fa.result.before[nid]))
            lines.append("      after:  %s" % _state_text(fa.result.after[nid]))
    _emit("\n".join(lines), args)
    return 0


def _report_json(report) -> "dict":
    return {
        "singletons_propagated": report.singletons_propagated,
        "guards_true": report.guards_true,
        "guards_false": report.guards_false,
        "guards_eliminated": report.guards_eliminated,
        "constants_folded": report.constants_folded,
        "dead_branches_removed": report.dead_branches_removed,
    }


def _has_assert_false(prog) -> bool:
    for fn in prog.functions.values():
        for stmt in walk_stmts(fn.body):
            if isinstance(stmt, Assert) and isinstance(stmt.cond, BoolLit) \
                    and not stmt.cond.value:
                return True
    return False


def cmd_optimize(args) -> int:
    prog = _read_program(args.input)
    config = _config(args)
    optimized, report = optimize_program(prog, config)
    source = program_to_source(optimized)
    if args.format == "json":
        analyses = analyze_program(prog, config)
        _emit(_document(source, config, analyses, _report_json(report)), args)
    else:
        trailer = "\n".join("// %s: %d" % (k, v)
                            for k, v in sorted(_report_json(report).items()))
        _emit(source + trailer, args)
    return 1 if _has_assert_false(optimized) else 0


def cmd_instrument(args) -> int:
    prog = _read_program(args.input)
    config = _config(args)
    analyses = analyze_program(prog, config)
    instrumented, points = instrument_program(prog, analyses, config)
    source = program_to_source(instrumented)
    points_json = [{
        "function": p.function,
        "node": p.node,
        "kind": p.kind,
        "vars": sorted(p.vars),
        "assume": expr_to_source(p.emitted),
    } for p in points]
    if args.format == "json":
        _emit(_document(source, config, analyses, {"points": points_json}), args)
    else:
        trailer = "\n".join(
            "// %s:%d %s: assume(%s)" % (p["function"], p["node"], p["kind"], p["assume"])
            for p in points_json)
        _emit(source + trailer if trailer else source, args)
    return 0


def cmd_contract(args) -> int:
    box = parse_box(args.box)
    cond = parse_condition(args.constraint, list(box))
    result = contract_fixpoint([Constraint.from_expr(cond)], box,
                               max_rounds=args.max_rounds)
    if args.format == "json":
        _emit(json.dumps({
            "constraint": args.constraint,
            "box": box_render(box),
            "result": box_render(result),
        }, indent=2), args)
    else:
        _emit(box_render(result), args)
    return 0


def cmd_check(args) -> int:
    prog = _read_program(args.input)
    config = _config(args)
    analyses = analyze_program(prog, config)
    lines = []
    clean = True

    violations = check_soundness(prog, analyses, step_limit=args.step_limit)
    lines.append("soundness: %d violation(s)" % len(violations))
    for v in violations[:10]:
        lines.append("  %s node %d: %s = %d outside %s (choices %s)"
                     % (v.function, v.node, v.var, v.value, v.interval, list(v.choices)))
    clean &= not violations

    optimized, _ = optimize_program(prog, config)
    eq = check_equivalence(prog, optimized, step_limit=args.step_limit)
    lines.append("optimize equivalence: %s" % ("ok" if eq else "FAILED %r" % (eq.counterexample,)))
    clean &= bool(eq)

    instrumented, _ = instrument_program(prog, analyses, config)
    eq = check_equivalence(prog, instrumented, step_limit=args.step_limit)
    lines.append("instrument invariance: %s" % ("ok" if eq else "FAILED %r" % (eq.counterexample,)))
    clean &= bool(eq)

    lines.append("result: %s" % ("clean" if clean else "violations found"))
    _emit("\n".join(lines), args)
    return 0 if clean else 1


def _add_common(parser: argparse.ArgumentParser, with_input: bool = True) -> None:
    if with_input:
        parser.add_argument("input", help="program file in the mini language")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--output", help="write output to this file (default stdout)")
    parser.add_argument("--widening-delay", type=int, default=2)
    parser.add_argument("--narrowing-passes", type=int, default=2)
    parser.add_argument("--no-interval-arith", action="store_true",
                        help="extrapolate all arithmetic on non-singletons to infinity")
    parser.add_argument("--no-contractors", action="store_true",
                        help="refine conditions with simple comparison pruning only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intana",
        description="Interval analysis, contraction, and rewriting for a mini language.")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("analyze", help="dump per-node interval states"))
    _add_common(sub.add_parser("optimize", help="rewrite using interval facts"))
    _add_common(sub.add_parser("instrument", help="insert interval assumptions"))

    contract = sub.add_parser("contract", help="contract a box by one constraint")
    contract.add_argument("--constraint", required=True,
                          help='e.g. "x + y == 5"')
    contract.add_argument("--box", required=True,
                          help='e.g. "x:[0,10], y:[2,4]"')
    contract.add_argument("--max-rounds", type=int, default=10)
    contract.add_argument("--format", choices=("text", "json"), default="text")
    contract.add_argument("--output")

    check = sub.add_parser("check", help="validate against exhaustive execution")
    _add_common(check)
    check.add_argument("--step-limit", type=int, default=10_000)

    return parser


_COMMANDS = {
    "analyze": cmd_analyze,
    "optimize": cmd_optimize,
    "instrument": cmd_instrument,
    "contract": cmd_contract,
    "check": cmd_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return 2
    except (UnboundedNondetError, EnumerationCapError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
