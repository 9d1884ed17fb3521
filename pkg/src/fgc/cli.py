"""Batch command-line front end.

    fgc check     <file.fg>   type-check and print the program's type
    fgc run       <file.fg>   evaluate and print the result
    fgc emit-core <file.fg>   print the elaborated core term
    fgc ast       <file.fg>   print the parsed syntax tree

Exit codes: 0 success, 1 type errors, 2 parse errors, 3 I/O errors,
4 fuel exhausted.  Set FGC_COLOR=0|1 to force color off or on.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .elaborate import translate_program
from .parser import ParseError, parse_program, pretty_type
from .sysf import DEFAULT_FUEL, Diverged, Stuck, Value, pretty_core, \
    pretty_core_type, sf_eval, sf_typecheck
from .typecheck import check_program

EXIT_OK = 0
EXIT_TYPE_ERROR = 1
EXIT_PARSE_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_DIVERGED = 4


def _use_color() -> bool:
    setting = os.environ.get("FGC_COLOR")
    if setting == "1":
        return True
    if setting == "0":
        return False
    return sys.stderr.isatty()


def _print_diagnostics(diags, fmt: str) -> None:
    if fmt == "json":
        payload = {
            "schema": 1,
            "diagnostics": [
                {
                    "code": d.code,
                    "message": d.message,
                    "file": d.span.file if d.span else None,
                    "span": {
                        "start_line": d.span.start_line,
                        "start_col": d.span.start_col,
                        "end_line": d.span.end_line,
                        "end_col": d.span.end_col,
                    } if d.span else None,
                    "notes": [
                        {"span": str(ns) if ns else None, "text": nt}
                        for ns, nt in getattr(d, "notes", ())
                    ],
                }
                for d in diags
            ],
        }
        print(json.dumps(payload, indent=2), file=sys.stderr)
        return
    color = _use_color()
    for d in diags:
        text = str(d)
        if color:
            text = text.replace("error[", "\x1b[31merror\x1b[0m[", 1)
        print(text, file=sys.stderr)


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        print(f"fgc: cannot read {path}: {exc.strerror}", file=sys.stderr)
        return None


def _parse_and_check(path: str, fmt: str):
    """Returns (exit_code, tree, type); tree/type are None on failure."""
    src = _load(path)
    if src is None:
        return EXIT_IO_ERROR, None, None
    try:
        tree = parse_program(src, path)
    except ParseError as exc:
        _print_diagnostics(exc.diagnostics, fmt)
        return EXIT_PARSE_ERROR, None, None
    result = check_program(tree)
    if isinstance(result, list):
        _print_diagnostics(result, fmt)
        return EXIT_TYPE_ERROR, tree, None
    return EXIT_OK, tree, result


def cmd_check(args) -> int:
    code, _, ty = _parse_and_check(args.file, args.format)
    if code == EXIT_OK:
        print(pretty_type(ty))
    return code


def cmd_run(args) -> int:
    code, tree, _ = _parse_and_check(args.file, args.format)
    if code != EXIT_OK:
        return code
    outcome = sf_eval(translate_program(tree), args.fuel)
    match outcome:
        case Value(v):
            if isinstance(v, bool):
                print("true" if v else "false")
            elif isinstance(v, int):
                print(v)
            else:
                print(pretty_core(v))
            return EXIT_OK
        case Diverged(steps):
            print(f"fuel exhausted after {steps} steps", file=sys.stderr)
            return EXIT_DIVERGED
        case Stuck(reason):
            print(f"fgc: internal error: evaluation stuck: {reason}",
                  file=sys.stderr)
            return EXIT_TYPE_ERROR
    raise AssertionError(outcome)


def cmd_emit_core(args) -> int:
    code, tree, _ = _parse_and_check(args.file, args.format)
    if code != EXIT_OK:
        return code
    core = translate_program(tree)
    print(pretty_core(core))
    if args.verify:
        print(f"core: {pretty_core_type(sf_typecheck(core))}")
    return EXIT_OK


def cmd_ast(args) -> int:
    src = _load(args.file)
    if src is None:
        return EXIT_IO_ERROR
    try:
        tree = parse_program(src, args.file)
    except ParseError as exc:
        _print_diagnostics(exc.diagnostics, args.format)
        return EXIT_PARSE_ERROR
    print(repr(tree))
    return EXIT_OK


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("fuel must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fgc",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="source file (.fg)")
        p.add_argument("--format", choices=("human", "json"),
                       default="human", help="diagnostics format")

    p_check = sub.add_parser("check", help="type-check a program")
    common(p_check)
    p_check.set_defaults(fn=cmd_check)

    p_run = sub.add_parser("run", help="type-check and evaluate a program")
    common(p_run)
    p_run.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL,
                       help="evaluation step budget")
    p_run.set_defaults(fn=cmd_run)

    p_emit = sub.add_parser("emit-core",
                            help="print the elaborated core term")
    common(p_emit)
    p_emit.add_argument("--verify", action="store_true",
                        help="re-check the core and print its type")
    p_emit.set_defaults(fn=cmd_emit_core)

    p_ast = sub.add_parser("ast", help="print the parsed syntax tree")
    common(p_ast)
    p_ast.set_defaults(fn=cmd_ast)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
