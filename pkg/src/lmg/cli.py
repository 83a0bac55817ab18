"""Command-line interface.

Exit codes: 0 accept/ok, 1 reject, 2 error (bad grammar, bad flags, engine
refusal), 3 a limit was hit before a verdict.
"""
from __future__ import annotations

import argparse
import json
import sys
import threading
import time
from typing import Callable

from . import __version__
from .analysis import Eligibility, analyze, engine_eligibility, format_report, report_record
from .core import Derivation, Grammar, validate_grammar
from .general import Limits, Outcome, parse_general, recognize_general
from .oracle import Answer, Budget, Oracle, language_upto
from .poly import DynamicLeftRecursion, NotEligible, parse_poly, recognize_poly
from .syntax import GrammarSyntaxError, load_grammar, print_grammar, tokenize
from .transform import BackboneTree, backbone_grammar, backbone_tree, intersect

EXIT_OK, EXIT_REJECT, EXIT_ERROR, EXIT_LIMIT = 0, 1, 2, 3


class CliError(Exception):
    pass


def _deep(fn: Callable):
    """Run ``fn`` on a thread with a large stack; long inputs recurse deeply."""
    box = {}

    def target():
        try:
            box["value"] = fn()
        except BaseException as exc:  # re-raised on the calling thread
            box["error"] = exc

    old_limit = sys.getrecursionlimit()
    old_size = threading.stack_size()
    sys.setrecursionlimit(max(old_limit, 200_000))
    threading.stack_size(512 * 1024 * 1024)
    try:
        t = threading.Thread(target=target)
        t.start()
        t.join()
    finally:
        threading.stack_size(old_size)
        sys.setrecursionlimit(old_limit)
    if "error" in box:
        raise box["error"]
    return box["value"]


def _load(path: str) -> Grammar:
    try:
        g = load_grammar(path)
    except GrammarSyntaxError as exc:
        raise CliError(f"{path}:{exc.line}:{exc.column}: {exc.message}") from exc
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from exc
    report = validate_grammar(g)
    if not report.ok:
        raise CliError("\n".join(f"{path}: {d}" for d in report))
    return g


def _tokens(args) -> tuple[str, ...]:
    if args.input is not None:
        text = args.input
    elif args.file is not None:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    return tokenize(text, "chars" if args.chars else "words")


def _limits(args) -> Limits:
    try:
        return Limits(args.max_steps, args.max_depth, args.max_trees)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _engine(g: Grammar, requested: str) -> str:
    if requested == "auto":
        verdict, _ = engine_eligibility(analyze(g))
        return "poly" if verdict is Eligibility.POLY else "general"
    return requested


def _emit(args, record: dict) -> None:
    if args.format == "machine":
        print(" ".join(f"{k}={v}" for k, v in record.items()))
    else:
        print(record.get("verdict", ""))


# -- tree serialization -----------------------------------------------------------
def derivation_json(g: Grammar, d: Derivation, sep: str = " ") -> dict:
    return {
        "rule": g.label(d.rule),
        "span": list(d.span) if d.span is not None else None,
        "bindings": {v: sep.join(w) for v, w in d.binding},
        "children": [None if c is None else derivation_json(g, c, sep) for c in d.children],
    }


def backbone_json(tree: BackboneTree) -> dict:
    if tree.terminal:
        return {"terminal": tree.label}
    return {"label": tree.label, "children": [backbone_json(c) for c in tree.children]}


def _derivation_text(g: Grammar, d: Derivation, sep: str, indent: int = 0) -> list[str]:
    args = ", ".join(sep.join(a) or "eps" for a in d.args)
    span = "" if d.span is None else f" [{d.span[0]},{d.span[1]}]"
    binds = " ".join(f"{v}={sep.join(w) or 'eps'}" for v, w in d.binding)
    lines = [f"{'  ' * indent}{g.label(d.rule)} {d.head}({args}){span}" + (f"  {binds}" if binds else "")]
    for c in d.children:
        if c is not None:
            lines.extend(_derivation_text(g, c, sep, indent + 1))
    return lines


def _backbone_text(tree: BackboneTree, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if tree.terminal:
        return [f'{pad}"{tree.label}"']
    lines = [pad + tree.label + ("" if tree.children else " -> eps")]
    for c in tree.children:
        lines.extend(_backbone_text(c, indent + 1))
    return lines


# -- commands ---------------------------------------------------------------------
def cmd_validate(args) -> int:
    try:
        g = load_grammar(args.grammar)
    except GrammarSyntaxError as exc:
        print(f"{args.grammar}:{exc.line}:{exc.column}: {exc.message}", file=sys.stderr)
        return EXIT_ERROR
    report = validate_grammar(g)
    for d in report:
        print(f"{args.grammar}: {d}", file=sys.stderr)
    if not report.ok:
        return EXIT_ERROR
    if args.analyze:
        analysis = analyze(g)
        if args.format == "machine":
            _emit(args, report_record(analysis))
        else:
            print(format_report(analysis))
    elif args.format == "machine":
        _emit(args, {"valid": "yes", "rules": len(g.rules)})
    else:
        print("ok")
    return EXIT_OK


def cmd_recognize(args) -> int:
    g = _load(args.grammar)
    tokens = _tokens(args)
    limits = _limits(args)
    engine = _engine(g, args.engine)
    record = {"engine": engine, "length": len(tokens)}
    start = time.perf_counter()
    if engine == "poly":
        try:
            res = _deep(lambda: recognize_poly(g, tokens))
        except NotEligible as exc:
            raise CliError(str(exc)) from exc
        record["verdict"] = "accept" if res.accepted else "reject"
        record.update(res.stats)
        code = EXIT_OK if res.accepted else EXIT_REJECT
    elif engine == "general":
        res = _deep(lambda: recognize_general(g, tokens, limits))
        record["verdict"] = res.outcome.value
        if res.limit:
            record["limit"] = res.limit
        record.update(res.stats)
        code = {Outcome.ACCEPT: EXIT_OK, Outcome.REJECT: EXIT_REJECT}.get(res.outcome, EXIT_LIMIT)
    else:
        budget = Budget(args.oracle_depth, args.max_steps)
        ans = _deep(lambda: Oracle(g).derives(g.start, (), tokens, budget))
        record["verdict"] = {Answer.YES: "accept", Answer.NO: "reject"}.get(ans, "limit-exceeded")
        code = {Answer.YES: EXIT_OK, Answer.NO: EXIT_REJECT}.get(ans, EXIT_LIMIT)
    record["time_s"] = f"{time.perf_counter() - start:.6f}"
    _emit(args, record)
    return code


def cmd_parse(args) -> int:
    g = _load(args.grammar)
    tokens = _tokens(args)
    limits = _limits(args)
    engine = _engine(g, args.engine)
    sep = "" if args.chars else " "
    if engine == "poly":
        try:
            res = _deep(lambda: parse_poly(g, tokens))
        except NotEligible as exc:
            raise CliError(str(exc)) from exc
        trees = [res.derivation] if res.derivation is not None else []
    elif engine == "general":
        res = _deep(lambda: parse_general(g, tokens, limits))
        if res.outcome is Outcome.LIMIT_EXCEEDED:
            print(f"limit exceeded: {res.limit} {res.detail}".rstrip(), file=sys.stderr)
            return EXIT_LIMIT
        trees = res.derivations
    else:
        budget = Budget(args.oracle_depth, args.max_steps)
        trees = _deep(lambda: Oracle(g).derivations(g.start, (), tokens, budget, limits.max_trees))
    if not trees:
        return EXIT_REJECT
    for i, d in enumerate(trees[:limits.max_trees]):
        if args.backbone:
            tree = backbone_tree(g, d)
            if args.format == "machine":
                print(json.dumps({"yield": sep.join(tree.leaves()), "tree": backbone_json(tree)}))
            else:
                print(f"# backbone {i + 1}: {sep.join(tree.leaves())}")
                print("\n".join(_backbone_text(tree)))
        elif args.format == "machine":
            print(json.dumps(derivation_json(g, d, sep)))
        else:
            print(f"# derivation {i + 1}")
            print("\n".join(_derivation_text(g, d, sep)))
    return EXIT_OK


def cmd_backbone(args) -> int:
    g = _load(args.grammar)
    sys.stdout.write(print_grammar(backbone_grammar(g).to_lmg()))
    return EXIT_OK


def cmd_intersect(args) -> int:
    g = intersect(_load(args.first), _load(args.second))
    text = print_grammar(g)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def parse_n_range(spec: str) -> list[int]:
    """``"8..64"`` doubles from 8 up to 64; ``"8,16,32"`` is taken literally."""
    try:
        if ".." in spec:
            lo, hi = (int(x) for x in spec.split("..", 1))
            if lo < 0 or hi < lo:
                raise ValueError
            out, n = [], lo
            while n <= hi:
                out.append(n)
                n = max(1, 2 * n)
            return out
        values = [int(x) for x in spec.split(",") if x.strip()]
        if not values or min(values) < 0:
            raise ValueError
        return values
    except ValueError:
        raise CliError(f"bad --n-range {spec!r}; use LO..HI or a comma-separated list") from None


FAMILIES = {"anbncn": lambda n: ("a",) * n + ("b",) * n + ("c",) * n}


def cmd_bench(args) -> int:
    g = _load(args.grammar)
    limits = _limits(args)
    engine = _engine(g, args.engine)
    make = FAMILIES[args.family]
    code = EXIT_OK
    for n in parse_n_range(args.n_range):
        tokens = make(n)
        best, record = None, {}
        for _ in range(args.repeat):
            start = time.perf_counter()
            if engine == "poly":
                try:
                    res = _deep(lambda: recognize_poly(g, tokens))
                except NotEligible as exc:
                    raise CliError(str(exc)) from exc
                verdict, stats = ("accept" if res.accepted else "reject"), res.stats
            else:
                res = _deep(lambda: recognize_general(g, tokens, limits))
                verdict, stats = res.outcome.value, res.stats
            elapsed = time.perf_counter() - start
            if best is None or elapsed < best:
                best = elapsed
            record = {"n": n, "engine": engine, "verdict": verdict}
            record.update(stats)
        record["time_s"] = f"{best:.6f}"
        print(" ".join(f"{k}={v}" for k, v in record.items()))
        if record["verdict"] == "limit-exceeded":
            code = EXIT_LIMIT
    return code


def cmd_oracle(args) -> int:
    g = _load(args.grammar)
    budget = Budget(args.oracle_depth, args.max_steps)
    sep = "" if args.chars else " "
    if args.alphabet is not None:
        if args.maxlen is None:
            raise CliError("--alphabet needs --maxlen")
        alphabet = [a for a in args.alphabet.split(",") if a]
        accepted, exhausted = _deep(lambda: language_upto(g, alphabet, args.maxlen, budget))
        for w in sorted(accepted, key=lambda w: (len(w), w)):
            print(sep.join(w) if w else "eps")
        for w in sorted(exhausted, key=lambda w: (len(w), w)):
            print(f"undecided: {sep.join(w) or 'eps'}", file=sys.stderr)
        return EXIT_LIMIT if exhausted else EXIT_OK
    tokens = _tokens(args)
    ans = _deep(lambda: Oracle(g).derives(g.start, (), tokens, budget))
    print(ans.value)
    return {Answer.YES: EXIT_OK, Answer.NO: EXIT_REJECT}.get(ans, EXIT_LIMIT)


# -- argument parsing -------------------------------------------------------------
def _input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", nargs="?", help="input text (default: read --file or stdin)")
    p.add_argument("--file", help="read the input from a file")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--chars", action="store_true", help="one token per character")
    mode.add_argument("--words", action="store_true", help="whitespace-separated tokens (default)")


def _limit_flags(p: argparse.ArgumentParser) -> None:
    defaults = Limits()
    p.add_argument("--max-steps", type=int, default=defaults.max_steps)
    p.add_argument("--max-depth", type=int, default=defaults.max_depth)
    p.add_argument("--max-trees", type=int, default=defaults.max_trees)
    p.add_argument("--oracle-depth", type=int, default=Budget().max_derivation_depth,
                   help="derivation depth budget of the oracle engine")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lmg", description="Literal movement grammar workbench")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "machine"), default="text",
                        help="machine: one key=value record (or JSON tree) per line")
    sub = parser.add_subparsers(dest="command", required=True)
    engines = ("auto", "general", "poly", "oracle")

    p = sub.add_parser("validate", parents=[common], help="check a grammar file")
    p.add_argument("grammar")
    p.add_argument("--analyze", action="store_true", help="also classify the grammar")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("recognize", parents=[common], help="accept or reject an input")
    p.add_argument("grammar")
    _input_flags(p)
    p.add_argument("--engine", choices=engines, default="auto")
    _limit_flags(p)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("parse", parents=[common], help="print derivations of an input")
    p.add_argument("grammar")
    _input_flags(p)
    p.add_argument("--engine", choices=engines, default="general")
    p.add_argument("--backbone", action="store_true", help="print context-free backbone trees")
    _limit_flags(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("backbone", parents=[common], help="print the context-free backbone grammar")
    p.add_argument("grammar")
    p.set_defaults(func=cmd_backbone)

    p = sub.add_parser("intersect", parents=[common], help="grammar for the intersection of two languages")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("bench", parents=[common], help="time recognition on a family of inputs")
    p.add_argument("grammar")
    p.add_argument("--family", choices=sorted(FAMILIES), default="anbncn")
    p.add_argument("--n-range", default="8..64")
    p.add_argument("--engine", choices=("auto", "general", "poly"), default="auto")
    p.add_argument("--repeat", type=int, default=1, help="report the best of this many runs")
    _limit_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", parents=[common], help="brute-force derivability")
    p.add_argument("grammar")
    _input_flags(p)
    p.add_argument("--alphabet", help="comma-separated tokens; enumerate the language")
    p.add_argument("--maxlen", type=int)
    _limit_flags(p)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except DynamicLeftRecursion as exc:
        print(f"limit exceeded: left-recursion: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
