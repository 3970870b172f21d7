"""Command-line interface: one structured JSON report per invocation.

Exit codes: 0 success, 2 parse error, 3 precondition violation, 4 contract
failure, 5 budget exhaustion.  The report goes to stdout; a short human
summary goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from .analysis import delta_lower_bound, generalized_delta
from .constructions import (
    CounterexampleReport,
    TheoremOutcome,
    build_counterexample,
    universal_subform_pipeline,
    verify_counterexample,
)
from .errors import (
    BudgetExceededError,
    ContractFailure,
    ParseError,
    PreconditionError,
)
from .field import DEFAULT_UNIT_CEILING, FieldContext, FieldElement, get_context
from .forms import (
    Definiteness,
    GeneralizedForm,
    associated_form,
    classify_generalized,
    proper_variables,
)
from .parser import format_element, format_form, parse_element, parse_form
from .search import (
    BoundedStrategy,
    DefiniteStrategy,
    SearchVerdict,
    decompose,
    indecomposables_up_to,
    represent_bounded,
    represent_definite,
    universality_report,
)

_EXIT_BY_ERROR: list[tuple[type[Exception], int]] = [
    (ParseError, 2),
    (PreconditionError, 3),
    (ContractFailure, 4),
    (BudgetExceededError, 5),
]

_DEFAULT_THEOREM_FORM = "z1^2 + z2^2 + z3^2 + z4^2 + t(z4)^2"


def _element_json(x: FieldElement) -> dict[str, str]:
    return x.to_json()


def _verdict_json(v: SearchVerdict) -> dict[str, Any]:
    payload: dict[str, Any] = {"status": v.status}
    if v.witness is not None:
        payload["witness"] = [_element_json(z) for z in v.witness.assignment]
        payload["value"] = _element_json(v.witness.value)
    if v.height is not None:
        payload["height"] = v.height
    if v.box is not None:
        payload["box"] = [list(b) for b in v.box]
    return payload


def _context(args: argparse.Namespace) -> FieldContext:
    return get_context(args.d, args.unit_ceiling)


def _parse_form_arg(args: argparse.Namespace, ctx: FieldContext) -> GeneralizedForm:
    return parse_form(args.form, ctx)


def _require_integral(g: GeneralizedForm) -> None:
    if not g.is_integral():
        raise PreconditionError("this command requires an integral form")


def _cmd_classify(args: argparse.Namespace) -> dict[str, Any]:
    ctx = _context(args)
    g = _parse_form_arg(args, ctx)
    assoc = associated_form(g)
    tag = classify_generalized(g)
    return {
        "definiteness": tag.value,
        "associated_columns": assoc.columns,
        "proper_variables": sorted(proper_variables(g)),
        "canonical_form": format_form(g),
    }


def _cmd_delta(args: argparse.Namespace) -> dict[str, Any]:
    ctx = _context(args)
    g = _parse_form_arg(args, ctx)
    cert = generalized_delta(g)
    return {"certificate": cert.to_json(), "columns": cert.form.n}


def _cmd_represent(args: argparse.Namespace) -> dict[str, Any]:
    ctx = _context(args)
    g = _parse_form_arg(args, ctx)
    _require_integral(g)
    target = parse_element(args.target, ctx)
    if args.height is not None:
        verdict = represent_bounded(g, target, args.height)
        mode = "bounded"
    else:
        if classify_generalized(g) is not Definiteness.DEFINITE:
            raise PreconditionError(
                "form is not totally positive definite; pass --height for a bounded search"
            )
        verdict = represent_definite(g, target, generalized_delta(g))
        mode = "definite"
    return {"mode": mode, "verdict": _verdict_json(verdict)}


def _cmd_universal(args: argparse.Namespace) -> dict[str, Any]:
    ctx = _context(args)
    g = _parse_form_arg(args, ctx)
    _require_integral(g)
    if args.height is not None:
        strategy = BoundedStrategy(args.height)
        mode = "bounded"
    else:
        if classify_generalized(g) is not Definiteness.DEFINITE:
            raise PreconditionError(
                "form is not totally positive definite; pass --height for a bounded search"
            )
        strategy = DefiniteStrategy(generalized_delta(g))
        mode = "definite"
    report = universality_report(g, args.trace_bound, strategy, parallel=args.parallel)
    return {
        "mode": mode,
        "trace_bound": report.trace_bound,
        "checked": report.checked,
        "failures": [
            {"target": _element_json(alpha), "verdict": _verdict_json(v)}
            for alpha, v in report.failures
        ],
    }


def _cmd_indecomposables(args: argparse.Namespace) -> dict[str, Any]:
    ctx = _context(args)
    listing = indecomposables_up_to(ctx, args.trace_bound)
    return {
        "trace_bound": listing.trace_bound,
        "count": len(listing.elements),
        "elements": [_element_json(x) for x in listing.elements],
    }


def _cmd_decompose(args: argparse.Namespace) -> dict[str, Any]:
    ctx = _context(args)
    target = parse_element(args.target, ctx)
    parts = decompose(ctx, target)
    return {
        "target": _element_json(target),
        "parts": [_element_json(p) for p in parts],
    }


def _counterexample_payload(report: CounterexampleReport) -> dict[str, Any]:
    routes: dict[str, int] = {"squares": 0, "split": 0}
    for rec in report.records:
        routes[rec.route] += 1
    return {
        "trace_bound": report.trace_bound,
        "checked": report.checked,
        "classification": {
            "combined": report.combined_class.value,
            "squares": report.squares_class.value,
        },
        "routes": routes,
        "failures": [],
        "subform_checks": {
            "target": _element_json(report.subform_target),
            "count": len(report.subform_checks),
            "all_fail": all(
                c.verdict.status == "none_complete" for c in report.subform_checks
            ),
        },
        "bounded_cross_checks": report.bounded_cross_checks,
    }


def _cmd_paper_counterexample(args: argparse.Namespace) -> dict[str, Any]:
    report = verify_counterexample(args.trace_bound, parallel=args.parallel)
    return _counterexample_payload(report)


def _theorem_payload(outcome: TheoremOutcome) -> dict[str, Any]:
    max_exp = max((rec.exponent for rec in outcome.per_target), default=0)
    return {
        "trace_bound": outcome.verified_to,
        "targets": len(outcome.per_target),
        "subform": format_form(outcome.subform.as_generalized()),
        "subform_columns": outcome.subform.n,
        "certificate": outcome.delta.to_json(),
        "max_unit_exponent": max_exp,
        "all_proper_coordinates_zero": True,
    }


def _cmd_paper_theorem(args: argparse.Namespace) -> dict[str, Any]:
    ctx = _context(args)
    g = parse_form(args.form, ctx)
    _require_integral(g)
    outcome = universal_subform_pipeline(g, args.trace_bound)
    return _theorem_payload(outcome)


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="genquad",
        description="Exact arithmetic for generalized quadratic forms over real quadratic fields.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_d: bool = True) -> None:
        if with_d:
            p.add_argument("--d", type=int, required=True, help="squarefree field parameter D")
        p.add_argument(
            "--unit-ceiling",
            type=int,
            default=DEFAULT_UNIT_CEILING,
            help="coefficient ceiling for the fundamental unit search",
        )

    p = sub.add_parser("classify", help="definiteness of a form")
    add_common(p)
    p.add_argument("form")
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("delta", help="rational floor certificate for a definite form")
    add_common(p)
    p.add_argument("form")
    p.set_defaults(handler=_cmd_delta)

    p = sub.add_parser("represent", help="decide representation of a target element")
    add_common(p)
    p.add_argument("--target", required=True)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("form")
    p.set_defaults(handler=_cmd_represent)

    p = sub.add_parser("universal", help="trace-bounded universality verification")
    add_common(p)
    p.add_argument("--trace-bound", type=int, required=True)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("form")
    p.set_defaults(handler=_cmd_universal)

    p = sub.add_parser("indecomposables", help="indecomposable totally positive integers")
    add_common(p)
    p.add_argument("--trace-bound", type=int, required=True)
    p.set_defaults(handler=_cmd_indecomposables)

    p = sub.add_parser("decompose", help="split a totally positive integer into indecomposables")
    add_common(p)
    p.add_argument("--target", required=True)
    p.set_defaults(handler=_cmd_decompose)

    paper = sub.add_parser("paper", help="built-in verification scenarios")
    paper_sub = paper.add_subparsers(dest="scenario", required=True)

    p = paper_sub.add_parser(
        "counterexample",
        help="universal semidefinite form with no universal quadratic subform",
    )
    p.add_argument("--trace-bound", type=int, default=20)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--unit-ceiling", type=int, default=DEFAULT_UNIT_CEILING)
    p.set_defaults(handler=_cmd_paper_counterexample)

    p = paper_sub.add_parser(
        "theorem",
        help="extract and certify the universal quadratic subform of a definite form",
    )
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--trace-bound", type=int, default=30)
    p.add_argument("--unit-ceiling", type=int, default=DEFAULT_UNIT_CEILING)
    p.add_argument("form", nargs="?", default=_DEFAULT_THEOREM_FORM)
    p.set_defaults(handler=_cmd_paper_theorem)

    return top


def _inputs_echo(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"handler", "command", "scenario"}
    echo = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        echo[key.replace("_", "-")] = value
    return echo


def _command_name(args: argparse.Namespace) -> str:
    name = args.command
    scenario = getattr(args, "scenario", None)
    return f"{name} {scenario}" if scenario else name


def run_command(argv: list[str]) -> tuple[dict[str, Any], int]:
    """Execute one CLI invocation and return (report, exit_status)."""
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    name = _command_name(args)
    try:
        result = args.handler(args)
        report = {
            "command": name,
            "inputs": _inputs_echo(args),
            "result": result,
            "status": 0,
        }
        return report, 0
    except tuple(err for err, _ in _EXIT_BY_ERROR) as exc:
        code = next(code for err, code in _EXIT_BY_ERROR if isinstance(exc, err))
        error: dict[str, Any] = {"message": str(exc)}
        if isinstance(exc, ParseError):
            error["position"] = exc.position
        report = {
            "command": name,
            "inputs": _inputs_echo(args),
            "error": error,
            "status": code,
        }
        return report, code


def _summary_line(report: dict[str, Any]) -> str:
    if report["status"] != 0:
        return f"{report['command']}: error ({report['error']['message']})"
    result = report["result"]
    name = report["command"]
    if name == "classify":
        return f"classify: {result['definiteness']}"
    if name == "delta":
        return f"delta: {result['certificate']['delta']}"
    if name == "represent":
        return f"represent: {result['verdict']['status']}"
    if name == "universal":
        return f"universal: {len(result['failures'])} failure(s) among {result['checked']} targets"
    if name == "indecomposables":
        return f"indecomposables: {result['count']} element(s)"
    if name == "decompose":
        return f"decompose: {len(result['parts'])} part(s)"
    if name == "paper counterexample":
        return (
            f"counterexample: {result['checked']} targets OK, "
            f"{result['subform_checks']['count']} subforms all fail"
        )
    if name == "paper theorem":
        return f"theorem: subform {result['subform']} certified to trace {result['trace_bound']}"
    return name


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    report, code = run_command(argv)
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    sys.stderr.write(_summary_line(report) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
