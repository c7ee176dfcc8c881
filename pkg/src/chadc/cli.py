"""Command-line entry point.

Exit codes: 0 success, 1 user error (parse, type, bad flags or input),
2 runtime evaluation error, 3 failed benchmark rule.  Machine-readable
output goes to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .errors import EvalError, UserError

EXIT_OK, EXIT_USER, EXIT_RUNTIME, EXIT_BENCH = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USER, "%s: error: %s\n" % (self.prog, message))


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _load(path: str):
    from .lang import parse_program, typecheck
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UserError("cannot read %s: %s" % (path, e.strerror)) from None
    prog = parse_program(text)
    ty = typecheck(prog.types, prog.body)
    return prog, ty


def _point(prog, text: Optional[str]):
    from .jsonio import decode_point, parse_json
    if text is None:
        if prog.types:
            raise UserError("--point is required")
        return []
    return decode_point(prog.names, prog.types, parse_json(text, "--point"))


def parse_sizes(text: str) -> List[int]:
    """'a..b' is the powers of two from a to b; 'a,b,c' is an explicit list."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            if lo < 1 or hi < lo:
                raise ValueError
            out, n = [], 1
            while n < lo:
                n *= 2
            while n <= hi:
                out.append(n)
                n *= 2
            if not out:
                raise ValueError
            return out
        return sorted(int(x) for x in text.split(","))
    except ValueError:
        raise UserError("bad --sizes %r (use a..b for powers of two or a,b,c)" % text) from None


# ---- commands ------------------------------------------------------------------------

def cmd_check(args) -> int:
    from .lang import show_type
    prog, ty = _load(args.program)
    _emit({"ok": True, "type": show_type(ty)})
    return EXIT_OK


def cmd_run(args) -> int:
    from .evaluator import evaluate
    from .jsonio import encode_value
    prog, ty = _load(args.program)
    point = _point(prog, args.point)
    v, cost = evaluate(prog.body, point)
    _emit({"value": encode_value(ty, v), "cost": cost})
    return EXIT_OK


def cmd_grad(args) -> int:
    from .chad.driver import run_gradient
    from .chad.transform import d2_type
    from .evaluator import evaluate
    from .jsonio import decode_seed, encode_gradient, parse_json
    from .pipeline import prepare
    prog, ty = _load(args.program)
    point = _point(prog, args.point)
    prep = prepare(args.mode, prog.types, prog.body, prog.names)
    seed_json = parse_json(args.seed, "--seed")
    out_value = None if ty is None else evaluate(prog.body, point)[0]
    seed = decode_seed(ty, d2_type(ty), seed_json, out_value)
    res = run_gradient(prep.transformed, point, seed)
    _emit(encode_gradient(prog.names, prog.types, res.cotangents, point))
    return EXIT_OK


def cmd_transform(args) -> int:
    from .lang import pretty
    from .lang.scope import term_size
    from .pipeline import prepare
    prog, _ = _load(args.program)
    prep = prepare(args.mode, prog.types, prog.body, prog.names)
    tr = prep.transformed
    if args.print:
        sys.stdout.write(pretty(tr.term, prog.names) + "\n")
    else:
        _emit({"mode": args.mode, "source_size": term_size(prog.body),
               "derivative_size": term_size(tr.term)})
    return EXIT_OK


def cmd_compare_oracle(args) -> int:
    from .oracle import grad_fd, grad_forward, random_point, relative_error
    from .pipeline import gradient
    from .chad.driver import dense_gradient
    from .lang.types import REAL
    results = []
    for path in args.programs:
        prog, ty = _load(path)
        if ty is not REAL:
            raise UserError("%s: compare-oracle needs a Real result" % path)
        if args.point is not None:
            points = [_point(prog, args.point)]
        else:
            rng = random.Random(args.rng_seed)
            points = [random_point(prog.types, rng) for _ in range(args.points)]
        e_fwd = e_fd = 0.0
        for pt in points:
            res = gradient(args.mode, prog.types, prog.body, pt)
            g = dense_gradient(prog.types, res, pt)
            e_fwd = max(e_fwd, relative_error(g, grad_forward(prog.types, prog.body, pt)))
            e_fd = max(e_fd, relative_error(g, grad_fd(prog.types, prog.body, pt)))
        results.append({"program": path, "mode": args.mode, "points": len(points),
                        "max_rel_err_forward": e_fwd, "max_rel_err_fd": e_fd})
    _emit(results if len(results) != 1 else results[0])
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import regression_check, report_json, write_report
    from .pipeline import MODES
    sizes = parse_sizes(args.sizes)
    rep = regression_check(args.family, args.mode, sizes, args.rule, args.rng_seed)
    if args.out:
        fig = write_report([rep], args.out)
        print("wrote %s and %s" % (args.out, fig), file=sys.stderr)
    sys.stdout.write(report_json([rep]))
    if not rep.passed:
        print("bench rule %s failed: %s" % (rep.rule, rep.detail), file=sys.stderr)
        return EXIT_BENCH
    return EXIT_OK


# ---- argument parsing ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from .bench.families import FAMILIES
    from .bench.measure import RULES
    from .pipeline import MODES
    p = _Parser(prog="chadc", description="Reverse-mode AD by source transformation.")
    p.add_argument("--version", action="version", version="chadc " + __version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def prog_cmd(name, helptext):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("program", help="program file (.chad)")
        return s

    s = prog_cmd("check", "parse and typecheck a program")
    s.set_defaults(fn=cmd_check)

    s = prog_cmd("run", "evaluate a program")
    s.add_argument("--point", help="input values as JSON")
    s.set_defaults(fn=cmd_run)

    s = prog_cmd("grad", "gradient (input cotangents) for an output seed")
    s.add_argument("--mode", choices=MODES, default="monadic")
    s.add_argument("--point", help="input values as JSON")
    s.add_argument("--seed", default="1", help="output cotangent as JSON (default 1)")
    s.set_defaults(fn=cmd_grad)

    s = prog_cmd("transform", "show the derivative program")
    s.add_argument("--mode", choices=MODES, default="monadic")
    s.add_argument("--print", action="store_true", help="pretty-print the derivative")
    s.set_defaults(fn=cmd_transform)

    s = sub.add_parser("compare-oracle", help="max relative error against the oracles")
    s.add_argument("programs", nargs="+")
    s.add_argument("--mode", choices=MODES, default="monadic")
    s.add_argument("--point", help="a single input point as JSON")
    s.add_argument("--points", type=int, default=10, help="random points per program")
    s.add_argument("--rng-seed", type=int, default=0)
    s.set_defaults(fn=cmd_compare_oracle)

    s = sub.add_parser("bench", help="measure a program family and check a rule")
    s.add_argument("--family", required=True, choices=sorted(FAMILIES))
    s.add_argument("--mode", choices=MODES, default="monadic")
    s.add_argument("--sizes", required=True, help="a..b (powers of two) or a,b,c")
    s.add_argument("--rule", choices=RULES, help="default: linear for t_n, else flat-ratio")
    s.add_argument("--out", help="write the JSON report here and a .png figure beside it")
    s.add_argument("--rng-seed", type=int, default=0)
    s.set_defaults(fn=cmd_bench)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UserError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USER
    except EvalError as e:
        print("runtime error: %s: %s" % (type(e).__name__, e), file=sys.stderr)
        return EXIT_RUNTIME
    except RecursionError:
        print("runtime error: nesting too deep", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
