"""Command-line interface: check, search, bound, run, compile, compare.

Exit codes: 0 success or the property holds, 1 it does not hold or
nothing was found, 2 usage or input error, 3 a resource limit was hit.
With ``--json`` each invocation prints exactly one JSON document.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import compiler
from .interpretation import EvalBudget, Overflow, derive_params, interpret
from .orders import OrderParams
from .orientation import (
    SearchSpace,
    SearchTimeout,
    check_lpo,
    check_trs,
    search_lpo,
    search_orientation,
)
from .rewriting import StepLimit, derivation_length, normalize
from .terms import Trs, TrsError, parse_term, parse_trs, print_term

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def bundled_problems() -> dict[str, str]:
    """Names of the rewrite systems shipped with the package."""
    root = resources.files("plpo") / "problems"
    return {p.name: str(p) for p in root.iterdir() if p.name.endswith(".trs")}


def _read(path: str) -> str:
    p = Path(path)
    if p.exists():
        return p.read_text()
    # fall back to a bundled system of the same file name
    bundled = bundled_problems().get(p.name)
    if bundled is None:
        raise _UsageError(f"no such file: {path}")
    return Path(bundled).read_text()


def load_trs(path: str) -> Trs:
    return parse_trs(_read(path))


def _params_doc(params: OrderParams) -> dict:
    return {
        "rank": dict(sorted(params.rank.items())),
        "lex": sorted(params.lex_set),
        "separation": None
        if not params.separation
        else {k: [bool(b) for b in v] for k, v in sorted(params.separation.items())},
    }


def _rules_doc(result, with_cert: bool) -> list[dict]:
    out = []
    for rule, cert in result.per_rule:
        d = {"rule": str(rule), "oriented": cert is not None, "case": cert.case_label if cert else None}
        if with_cert:
            d["certificate"] = cert.to_dict() if cert else None
        out.append(d)
    return out


def _print_rules(result, with_cert: bool) -> None:
    for i, (rule, cert) in enumerate(result.per_rule, start=1):
        print(f"  [{i}] {rule}: {cert.case_label if cert else 'not oriented'}")
        if with_cert and cert is not None:
            print(cert.format(indent=2))


# ---------------------------------------------------------------------------


def cmd_check(args) -> tuple[int, dict]:
    trs = load_trs(args.file)
    params = OrderParams.from_trs(trs, permutation_extension=args.permutation)
    result = check_trs(trs, params)
    doc = {
        "oriented": result.oriented,
        "count": result.count,
        "total": len(trs.rules),
        "params": _params_doc(params),
        "rules": _rules_doc(result, args.certificate or args.json),
    }
    if not args.json:
        print(f"oriented: {result.count}/{len(trs.rules)} rules")
        _print_rules(result, args.certificate)
    return (EXIT_OK if result.oriented else EXIT_NO), doc


def _space(args) -> SearchSpace:
    if args.vary is None or args.full:
        parts = {"rank", "lex", "sep"}
    else:
        parts = {p.strip() for p in args.vary.split(",") if p.strip()}
        unknown = parts - {"rank", "lex", "sep"}
        if unknown:
            raise _UsageError(f"--vary accepts rank, lex, sep; got {', '.join(sorted(unknown))}")
    return SearchSpace(
        vary_rank="rank" in parts,
        vary_lex="lex" in parts,
        vary_separation="sep" in parts,
        max_rank=args.max_rank,
    )


def cmd_search(args) -> tuple[int, dict]:
    trs = load_trs(args.file)
    space = _space(args)
    try:
        result = search_orientation(trs, space, timeout=args.timeout, permutation_extension=args.permutation)
    except SearchTimeout as exc:
        if not args.json:
            print(f"search timed out: {exc}")
        return EXIT_LIMIT, {"status": "timeout", "message": str(exc)}
    if result is None:
        if not args.json:
            print("search space exhausted: no orienting parameters")
        return EXIT_NO, {"status": "exhausted"}
    doc = {
        "status": "found",
        "candidates": result.candidates,
        "params": _params_doc(result.params),
        "rules": _rules_doc(result, args.certificate or args.json),
    }
    if not args.json:
        print(f"orientation found after {result.candidates} candidates")
        p = result.params
        print("  rank: " + ", ".join(f"{k}={v}" for k, v in p.rank.items()))
        print("  lex: " + (", ".join(sorted(p.lex_set)) or "-"))
        if p.separation:
            print("  separation: " + ", ".join(
                f"{k}=" + "".join("n" if b else "s" for b in v) for k, v in p.separation.items()
            ))
        _print_rules(result, args.certificate)
    return EXIT_OK, doc


def cmd_bound(args) -> tuple[int, dict]:
    trs = load_trs(args.file)
    ip = derive_params(trs)
    doc = {"ell": ip.ell, "K": ip.K, "d": ip.d, "rank": dict(sorted(ip.rank.items())), "term": None}
    if not args.json:
        print(f"ell={ip.ell}, K={ip.K}, d={ip.d}")
        print("  rank: " + ", ".join(f"{k}={v}" for k, v in ip.rank.items()))
    code = EXIT_OK
    if args.term:
        t = parse_term(args.term, trs.signature)
        value = interpret(t, ip, EvalBudget(args.budget_bits))
        doc["term"] = print_term(t)
        if isinstance(value, Overflow):
            doc.update(overflow=True, value=None, bits=None, message=str(value))
            code = EXIT_LIMIT
            if not args.json:
                print(f"I({print_term(t)}) {value}")
        else:
            doc.update(overflow=False, value=str(value), bits=value.bit_length())
            if not args.json:
                print(f"I({print_term(t)}) = {value}")
    return code, doc


def cmd_run(args) -> tuple[int, dict]:
    trs = load_trs(args.file)
    t = parse_term(args.term, trs.signature)
    if not t.is_ground:
        raise _UsageError("--term must be a ground term")
    if args.normalize:
        try:
            nf = normalize(t, trs, args.max_steps)
        except StepLimit as exc:
            if not args.json:
                print(f"step limit: {exc}")
            return EXIT_LIMIT, {"mode": "normalize", "term": print_term(t), "status": "limit"}
        if not args.json:
            print(print_term(nf))
        return EXIT_OK, {"mode": "normalize", "term": print_term(t), "status": "ok", "normal_form": print_term(nf)}
    report = derivation_length(t, trs, max_terms=args.max_terms, max_depth=args.max_steps)
    doc = {
        "mode": "dl",
        "term": print_term(t),
        "status": report.status,
        "max_length": report.max_length,
        "explored": report.explored,
        "cycle": [print_term(u) for u in report.cycle],
        "limit": report.limit,
    }
    if report.status == "cycle":
        if not args.json:
            print("nontermination: cycle " + " -> ".join(doc["cycle"] + doc["cycle"][:1]))
        return EXIT_NO, doc
    if report.status == "limit":
        if not args.json:
            print(f"limit reached: {report.limit}")
        return EXIT_LIMIT, doc
    if not args.json:
        print(f"derivation length: {report.max_length} ({report.explored} terms explored)")
    return EXIT_OK, doc


def cmd_compile(args) -> tuple[int, dict]:
    defs = compiler.parse_schema(_read(args.file))
    name = args.main or list(defs)[-1]
    if name not in defs:
        raise _UsageError(f"no definition named {name}")
    system = compiler.compile_program(defs[name])
    result = check_trs(system.trs, system.params)
    text = f"# compiled from {name}\n" + system.trs.to_text()
    if args.output:
        Path(args.output).write_text(text)
    elif not args.json:
        sys.stdout.write(text)
    doc = {
        "main": system.main_symbol.name,
        "definition": name,
        "oriented": result.oriented,
        "rules": len(system.trs.rules),
        "output": args.output,
        "trs": text,
    }
    if not args.json:
        print(f"# oriented: {result.count}/{len(system.trs.rules)} rules", file=sys.stderr)
    return (EXIT_OK if result.oriented else EXIT_NO), doc


def cmd_compare(args) -> tuple[int, dict]:
    trs = load_trs(args.file)
    params = OrderParams.from_trs(trs)
    n = len(trs.rules)
    doc = {"total": n}
    try:
        for key, checked, found in (
            ("plpo", check_trs(trs, params),
             lambda: search_orientation(trs, SearchSpace(max_rank=args.max_rank), timeout=args.timeout)),
            ("lpo", check_lpo(trs, params),
             lambda: search_lpo(trs, max_rank=args.max_rank, timeout=args.timeout)),
        ):
            result = found()
            doc[key] = {
                "declared": checked.count,
                "orientable": result is not None,
                "params": _params_doc(result.params) if result is not None else None,
            }
            if not args.json:
                verdict = "orientable" if result is not None else "not orientable (search space exhausted)"
                print(f"{key}: declared parameters orient {checked.count}/{n} rules; {verdict}")
    except SearchTimeout as exc:
        if not args.json:
            print(f"search timed out: {exc}")
        return EXIT_LIMIT, {**doc, "status": "timeout"}
    return EXIT_OK, {**doc, "status": "ok"}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plpo", description="Predicative lexicographic path order toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", help="emit one JSON document")
        return p

    p = add("check", "check the declared parameters orient every rule")
    p.add_argument("file")
    p.add_argument("--certificate", action="store_true", help="print proof certificates")
    p.add_argument("--permutation", action="store_true", help="allow permuted safe arguments in Case 4")
    p.set_defaults(run=cmd_check)

    p = add("search", "search ranks, lexicographic symbols and separations")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--full", action="store_true", help="vary everything (default)")
    group.add_argument("--vary", help="comma list drawn from rank,lex,sep")
    p.add_argument("--max-rank", type=int, default=None)
    p.add_argument("--timeout", type=float, default=None, help="seconds")
    p.add_argument("--certificate", action="store_true")
    p.add_argument("--permutation", action="store_true")
    p.set_defaults(run=cmd_search)

    p = add("bound", "report the interpretation parameters, optionally evaluate I(t)")
    p.add_argument("file")
    p.add_argument("--term")
    p.add_argument("--budget-bits", type=int, default=1_000_000)
    p.set_defaults(run=cmd_bound)

    p = add("run", "rewrite a ground term")
    p.add_argument("file")
    p.add_argument("--term", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--dl", action="store_true", help="longest derivation length (default)")
    mode.add_argument("--normalize", action="store_true", help="leftmost-innermost normal form")
    p.add_argument("--max-steps", type=int, default=100_000)
    p.add_argument("--max-terms", type=int, default=2_000_000)
    p.set_defaults(run=cmd_run)

    p = add("compile", "compile a schema file to the TRS format")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--main", help="definition to compile (default: the last one)")
    p.set_defaults(run=cmd_compile)

    p = add("compare", "report LPO against PLPO orientability")
    p.add_argument("file")
    p.add_argument("--max-rank", type=int, default=None)
    p.add_argument("--timeout", type=float, default=None)
    p.set_defaults(run=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    want_json = "--json" in argv
    command = next((a for a in argv if not a.startswith("-")), None)
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise _UsageError("missing subcommand")
        code, doc = args.run(args)
    except (_UsageError, TrsError, compiler.ProgramError, ValueError, OSError) as exc:
        if want_json:
            print(json.dumps({"command": command, "exit_code": EXIT_USAGE, "error": str(exc)}))
        else:
            print(f"plpo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (compiler.EvalLimit, RecursionError, MemoryError) as exc:
        if want_json:
            print(json.dumps({"command": command, "exit_code": EXIT_LIMIT, "error": str(exc)}))
        else:
            print(f"plpo: resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    if args.json:
        doc = {"command": args.command, "exit_code": code, **doc}
        print(json.dumps(doc, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
