"""Command-line interface.

Exit codes: 0 success or accepted, 1 well-formed input with a negative
verdict, 2 parse or type error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .certificates import replay_verdict
from .erasure import ErasureContext, erase
from .errors import (ArityError, FuelExhausted, ParseError, RecursorError, RuleError,
                     TermTypeError, ValidationError)
from .rewriting import STRATEGIES, RuleSystem, normalize
from .schema import check_system
from .signature import seal, validate
from .syntax import _Parser, load, parse_term, print_spec, spec_from
from .transforms import currify, encode_system, generate_recursors

OK, FAILED, BAD_INPUT = 0, 1, 2


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


def _emit(args, text_lines, data) -> None:
    if args.format == "structured":
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        for line in text_lines:
            print(line)


def _load(args):
    try:
        return load(args.file)
    except OSError as exc:
        raise _Exit(BAD_INPUT, f"{args.file}: {exc.strerror}")
    except ParseError as exc:
        raise _Exit(BAD_INPUT, f"{args.file}:{exc}")


def _rule_system(args, spec) -> RuleSystem:
    try:
        return RuleSystem(seal(spec.signature()), spec.rules)
    except ValidationError as exc:
        raise _Exit(FAILED, f"{args.file}: {exc}")
    except RuleError as exc:
        raise _Exit(BAD_INPUT, f"{args.file}: {exc}")


def _term(args, spec, rs):
    if args.expr in spec.terms:
        return spec.terms[args.expr]
    try:
        return parse_term(args.expr, rs.signature)
    except ParseError as exc:
        raise _Exit(BAD_INPUT, f"term:{exc}")


def _type(text: str):
    p = _Parser(text)
    try:
        t = p.type_()
        if p.tok.kind != "eof":
            raise p.error(f"unexpected '{p.tok.text}' after type")
    except ParseError as exc:
        raise _Exit(BAD_INPUT, f"type:{exc}")
    return t


# -- commands ------------------------------------------------------------------------

def cmd_check(args) -> int:
    spec = _load(args)
    report = validate(spec.signature())
    if not report.acceptable(spec.signature().flags):
        _emit(args, report.lines() + ["SN not guaranteed (signature rejected)"],
              {"file": args.file, "validation": report.lines(), "sn_guaranteed": False,
               "schema_accepted": False})
        return FAILED
    rs = _rule_system(args, spec)
    result = check_system(rs)
    lines = [f"{args.file}: {len(result.accepted_rules)}/{len(result.verdicts)} rules accepted"]
    for v in result.verdicts:
        mark = "accepted" if v.accepted else "rejected"
        lines.append(f"  [{mark}] {v.index}: {v.rule}")
        if not v.accepted:
            lines.append(f"      {v.diagnosis}")
        elif args.explain:
            for x, step in sorted(v.variables.items(), key=lambda kv: kv[0].name):
                lines.append(f"      {x.name} accessible by {step} in argument {step.arg}")
            lines += ["      " + ln for ln in v.derivation.tree_lines()]
            for d in v.conditions:
                lines += ["      condition: " + d.render()]
    lines += [f"warning: {w}" for w in result.warnings]
    lines += [n for n in result.validation.lines() if not n.startswith("note:")]
    lines.append(result.verdict_line())
    data = {"file": args.file, **result.to_dict(args.explain)}
    if args.explain:
        data["replay"] = all(replay_verdict(v, rs.signature) for v in result.accepted_rules)
    _emit(args, lines, data)
    return OK if result.schema_accepted else FAILED


def cmd_normalize(args) -> int:
    spec = _load(args)
    rs = _rule_system(args, spec)
    u = _term(args, spec, rs)
    try:
        res = normalize(rs, u, fuel=args.fuel, strategy=args.strategy)
    except FuelExhausted as exc:
        trace = exc.trace
        lines = [f"error: {exc}"]
        if args.trace and trace is not None:
            lines = trace.lines() + lines
        _emit(args, lines, {"error": str(exc),
                            "last": str(exc.last) if exc.last is not None else None,
                            "trace": trace.to_dict() if args.trace and trace else None})
        return FAILED
    lines = (res.trace.lines() if args.trace else []) + [str(res.normal_form)]
    data = {"term": str(u), "normal_form": str(res.normal_form), "steps": res.steps}
    if args.trace:
        data["trace"] = res.trace.to_dict()
    _emit(args, lines, data)
    return OK


def cmd_recursors(args) -> int:
    spec = _load(args)
    sig = _rule_system(args, spec).signature
    target = _type(args.target)
    try:
        bundle = generate_recursors(sig, args.cls, target)
    except RecursorError as exc:
        raise _Exit(FAILED, str(exc))
    out = spec_from(bundle.signature, list(spec.rules) + bundle.rules, spec.terms)
    text = print_spec(out)
    _emit(args, [text.rstrip("\n")],
          {"symbols": [fd.name for fd in bundle.symbols.values()],
           "rules": [str(r) for r in bundle.rules], "spec": text})
    return OK


def cmd_currify(args) -> int:
    spec = _load(args)
    sig = _rule_system(args, spec).signature
    if not sig.has_symbol(args.symbol):
        raise _Exit(BAD_INPUT, f"unknown symbol {args.symbol}")
    try:
        res = currify(sig, args.symbol)
    except ArityError as exc:
        raise _Exit(FAILED, str(exc))
    text = print_spec(spec_from(res.signature, list(spec.rules) + [res.rule], spec.terms))
    _emit(args, [text.rstrip("\n")],
          {"symbol": res.decl.name, "rule": str(res.rule), "spec": text})
    return OK


def cmd_encode(args) -> int:
    spec = _load(args)
    rs = encode_system(_rule_system(args, spec))
    text = print_spec(spec_from(rs.signature, rs.rules, spec.terms))
    _emit(args, [text.rstrip("\n")], {"rules": [str(r) for r in rs.rules], "spec": text})
    return OK


def cmd_erase(args) -> int:
    spec = _load(args)
    rs = _rule_system(args, spec)
    if not rs.signature.is_inductive(args.wrt):
        raise _Exit(BAD_INPUT, f"unknown inductive type {args.wrt}")
    u = _term(args, spec, rs)
    ctx = ErasureContext(args.wrt)
    result = erase(u, args.wrt, ctx)
    _emit(args, [str(result)],
          {"term": str(u), "erased": str(result), "type": str(result.type),
           "bottoms": sorted(s.name for s in ctx.bottoms.values())})
    return OK


# -- argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default=argparse.SUPPRESS,
                        help="output format (structured = JSON)")
    parser = argparse.ArgumentParser(
        prog="idts", parents=[common],
        description="Check, run and transform inductive data type systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="schema-check every rule")
    p.add_argument("file")
    p.add_argument("--explain", action="store_true", help="print derivations")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("normalize", parents=[common], help="reduce a term to normal form")
    p.add_argument("file")
    p.add_argument("-e", "--expr", required=True, help="term, or the name of a term in FILE")
    p.add_argument("--fuel", type=int, default=10_000)
    p.add_argument("--strategy", choices=STRATEGIES, default="outermost")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("recursors", parents=[common], help="generate recursor rules")
    p.add_argument("file")
    p.add_argument("--class", dest="cls", required=True, metavar="TYPE")
    p.add_argument("--target", required=True, metavar="TYPE")
    p.set_defaults(func=cmd_recursors)

    p = sub.add_parser("currify", parents=[common], help="add a curried constant")
    p.add_argument("file")
    p.add_argument("--symbol", required=True)
    p.set_defaults(func=cmd_currify)

    p = sub.add_parser("encode-cond", parents=[common], help="encode conditional rules")
    p.add_argument("file")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("erase", parents=[common], help="apply the erasing function")
    p.add_argument("file")
    p.add_argument("-e", "--expr", required=True)
    p.add_argument("--wrt", required=True, metavar="TYPE")
    p.set_defaults(func=cmd_erase)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not hasattr(args, "format"):
        args.format = "text"
    try:
        return args.func(args)
    except _Exit as exc:
        if str(exc):
            print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (TermTypeError, RuleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
