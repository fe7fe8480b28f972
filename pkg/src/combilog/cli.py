"""``combilog`` command line: check, run, compile and render programs.

Exit codes: 0 success, 1 domain error, 2 I/O or usage error.
"""

from __future__ import annotations

import argparse
import sys
import warnings

from .ast import check_program
from .codegen import compile_program, emit_prolog_text
from .engine import EvalConfig, solve
from .errors import CombilogError, ProgramError
from .higraph import PALETTE_ORDERS, HigraphWarning, render
from .parser import parse_program, parse_query

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path, data, stdout):
    if path is None or path == "-":
        buf = getattr(stdout, "buffer", None)
        if isinstance(data, bytes) and buf is not None:
            stdout.flush()
            buf.write(data)
            buf.flush()
        else:
            stdout.write(data.decode("utf-8") if isinstance(data, bytes) else data)
        return
    mode = "wb" if isinstance(data, bytes) else "w"
    kwargs = {} if mode == "wb" else {"encoding": "utf-8", "newline": "\n"}
    with open(path, mode, **kwargs) as fh:
        fh.write(data)


def _load(path, stderr):
    text = _read(path)
    try:
        return parse_program(text)
    except ProgramError as exc:
        for d in exc.diagnostics:
            print(f"{path}:{d}", file=stderr)
        raise


def format_answers(answers) -> str:
    if not answers:
        return "false.\n"
    lines = []
    for theta in answers:
        lines.append(theta.format() if len(theta) else "true.")
    return "\n".join(sorted(lines)) + "\n"


def cmd_check(args, stdout, stderr) -> int:
    program = parse_program(_read(args.program), check=False)
    diags = check_program(program)
    for d in diags:
        print(f"{args.program}:{d}", file=stdout)
    if diags:
        return EXIT_DOMAIN
    print(f"{args.program}: ok ({len(program.definitions)} definitions, "
          f"{len(program.facts)} fact predicates)", file=stdout)
    return EXIT_OK


def cmd_run(args, stdout, stderr) -> int:
    program = _load(args.program, stderr)
    query = parse_query(args.query, program)
    config = EvalConfig(args.max_solutions, args.max_fold_len)
    stdout.write(format_answers(solve(program, query, config)))
    return EXIT_OK


def cmd_compile(args, stdout, stderr) -> int:
    program = _load(args.program, stderr)
    text = emit_prolog_text(compile_program(program), comments=True)
    _write(args.out, text, stdout)
    return EXIT_OK


def cmd_render(args, stdout, stderr) -> int:
    program = _load(args.program, stderr)
    if args.definition not in program.definitions:
        print(f"error: no definition named '{args.definition}'", file=stderr)
        return EXIT_DOMAIN
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", HigraphWarning)
        data = render(program, args.definition, args.format, args.palette_order)
    for w in caught:
        print(f"warning: {w.message}", file=stderr)
    _write(args.out, data, stdout)
    return EXIT_OK


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="combilog", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="report static errors in a program")
    p.add_argument("program")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="answer a query")
    p.add_argument("program")
    p.add_argument("query", help='e.g. "?- siblings(X, Y)."')
    p.add_argument("--max-solutions", type=_positive, default=EvalConfig.max_solutions)
    p.add_argument("--max-fold-len", type=_positive, default=EvalConfig.max_fold_list_length)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compile", help="translate to Prolog")
    p.add_argument("program")
    p.add_argument("--out", help="output .pl file (default: stdout)")
    p.add_argument("--format", choices=["pl"], default="pl")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("render", help="draw one definition as a Higraph")
    p.add_argument("program")
    p.add_argument("definition")
    p.add_argument("--format", choices=["svg", "dot"], default="svg")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--palette-order", choices=PALETTE_ORDERS, default="paper")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_IO
    try:
        return args.func(args, stdout, stderr)
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_IO
    except ProgramError:
        return EXIT_DOMAIN
    except CombilogError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_DOMAIN


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
