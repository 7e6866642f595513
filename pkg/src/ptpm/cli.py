"""Command-line front end: match, opt, oracle, gen, project and bench."""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path
from typing import Sequence

from . import patterns
from .engine import MAX, MIN, EngineOptions, OptResult, fix_variables, ptpm, ptpm_fixed, ptpm_opt
from .generate import blowup_word, gear_word
from .io import (
    ParseError,
    dump_result,
    format_word,
    gnuplot_script,
    parse_pattern,
    parse_word,
    polygons_csv,
    project_2d,
    read_result,
    result_text,
    write_result,
)
from .model import DomainError, as_rational, check_valuation
from .oracle import brute_force_match_set
from .polyhedron import difference, format_poly, minimize
from .transform import PatternError

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PATTERN = 3
EXIT_ARGUMENT = 4
EXIT_MISMATCH = 5

BUILTIN_PREFIX = "builtin:"
STATS_HEADER = ("states", "matches", "parsing_s", "comp_s")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_ARGUMENT) from None


def load_pattern(source: str):
    """A .pat.json path, or ``builtin:NAME`` for a shipped pattern."""
    if source.startswith(BUILTIN_PREFIX):
        name = source[len(BUILTIN_PREFIX):]
        if name not in patterns.BUILTIN:
            raise CliError(
                f"unknown built-in pattern {name!r}; choose from {sorted(patterns.BUILTIN)}",
                EXIT_ARGUMENT,
            )
        return patterns.BUILTIN[name]()
    try:
        return parse_pattern(_read_text(source))
    except ParseError as exc:
        raise CliError(f"{source}: {exc}", EXIT_PARSE) from None


def load_word(path: str):
    try:
        return parse_word(_read_text(path))
    except (ParseError, DomainError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


def parse_valuation(text: str) -> dict:
    """``p1=1,p2=0.5`` to exact values."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise CliError(f"bad valuation item {item!r}; expected name=value", EXIT_ARGUMENT)
        try:
            out[name.strip()] = as_rational(value.strip())
        except DomainError as exc:
            raise CliError(str(exc), EXIT_ARGUMENT) from None
    return out


def _check_valuation(pattern, valuation) -> None:
    extra = sorted(set(valuation) - set(pattern.parameters))
    if extra:
        raise CliError(f"unknown parameters in valuation: {extra}", EXIT_ARGUMENT)
    try:
        check_valuation(pattern, valuation)
    except DomainError as exc:
        raise CliError(str(exc), EXIT_ARGUMENT) from None


def _parse_box(text: str):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise CliError("--box needs four values x0,x1,y0,y1", EXIT_ARGUMENT)
    try:
        return tuple(as_rational(p) for p in parts)
    except DomainError as exc:
        raise CliError(str(exc), EXIT_ARGUMENT) from None


def _row(values) -> str:
    return "\t".join(str(v) for v in values)


def _fmt_seconds(x: float) -> str:
    return f"{x:.3f}"


def describe_opt(result: OptResult) -> str:
    p = result.parameter
    if not result.feasible:
        return f"infeasible: no match for any value of {p}"
    if result.bound is None:
        return f"{p} unbounded above"
    value = result.bound
    value = str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if result.direction == MIN:
        if result.strict:
            return f"{p} > {value} (infimum, not attained)"
        return f"{p} >= {value} (minimum, attained)"
    if result.strict:
        return f"{p} < {value} (supremum, not attained)"
    return f"{p} <= {value} (maximum, attained)"


def cmd_match(args) -> int:
    t0 = time.perf_counter()
    pattern = load_pattern(args.pattern)
    word = load_word(args.word)
    parsing = time.perf_counter() - t0
    options = EngineOptions(subsumption=args.subsumption)
    try:
        if args.valuation is not None:
            valuation = parse_valuation(args.valuation)
            _check_valuation(pattern, valuation)
            m = ptpm_fixed(pattern, word, valuation, options)
        else:
            m = ptpm(pattern, word, options)
    except PatternError as exc:
        raise CliError(f"ill-formed pattern: {exc}", EXIT_PATTERN) from None
    doc, text = write_result(m, simplify=not args.raw)
    if args.out:
        Path(args.out).write_text(dump_result(doc), encoding="utf-8")
    print(_row(STATS_HEADER))
    print(_row((m.states, m.matches, _fmt_seconds(parsing), _fmt_seconds(m.comp_seconds))))
    if args.show:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_opt(args) -> int:
    pattern = load_pattern(args.pattern)
    word = load_word(args.word)
    if args.param not in pattern.parameters:
        raise CliError(f"unknown parameter {args.param!r}", EXIT_ARGUMENT)
    try:
        result = ptpm_opt(pattern, word, args.param, args.direction)
    except PatternError as exc:
        raise CliError(f"ill-formed pattern: {exc}", EXIT_PATTERN) from None
    print(describe_opt(result))
    print(_row(("states", "comp_s")))
    print(_row((result.states, _fmt_seconds(result.comp_seconds))))
    return EXIT_OK


def cmd_oracle(args) -> int:
    pattern = load_pattern(args.pattern)
    word = load_word(args.word)
    valuation = parse_valuation(args.valuation)
    _check_valuation(pattern, valuation)
    expected = brute_force_match_set(word, pattern, valuation)
    if not args.compare:
        if not expected.disjuncts:
            print("no match")
        for d in expected:
            print(format_poly(minimize(d)))
        return EXIT_OK
    try:
        stored = read_result(_read_text(args.compare))
    except ParseError as exc:
        raise CliError(f"{args.compare}: {exc}", EXIT_PARSE) from None
    missing = [p for p in pattern.parameters if p not in stored.space]
    if missing or list(stored.space.names[-2:]) != ["t", "t_prime"]:
        raise CliError("the stored result is not over this pattern's variables", EXIT_ARGUMENT)
    got = fix_variables(stored.disjuncts, valuation)
    for label, diff in (
        ("in the stored result but not in the oracle", difference(got, expected)),
        ("in the oracle but not in the stored result", difference(expected, got)),
    ):
        if diff.disjuncts:
            print("MISMATCH")
            print(f"witness region {label}:")
            print(format_poly(minimize(diff.disjuncts[0])))
            return EXIT_MISMATCH
    print("SEMANTICALLY-EQUAL")
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        if args.kind == "blowup":
            word = blowup_word(args.events, args.seed)
        else:
            word = gear_word(args.events, args.seed)
    except DomainError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    text = format_word(word)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_project(args) -> int:
    try:
        m = read_result(_read_text(args.input))
    except ParseError as exc:
        raise CliError(f"{args.input}: {exc}", EXIT_PARSE) from None
    names = [v.strip() for v in args.vars.split(",")]
    if len(names) != 2:
        raise CliError("--vars needs exactly two names X,Y", EXIT_ARGUMENT)
    box = _parse_box(args.box)
    try:
        polygons = project_2d(m, names[0], names[1], box)
    except DomainError as exc:
        raise CliError(str(exc), EXIT_ARGUMENT) from None
    text = polygons_csv(polygons, names[0], names[1])
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.gnuplot:
        csv_name = args.out or "projection.csv"
        Path(args.gnuplot).write_text(gnuplot_script(csv_name, names[0], names[1], box), encoding="utf-8")
    print(f"{len(polygons)} region{'' if len(polygons) == 1 else 's'}", file=sys.stderr)
    return EXIT_OK


BENCH_HEADER = ("word", "events", "states", "matches", "parsing_s", "comp_s")


def cmd_bench(args) -> int:
    pattern = load_pattern(args.pattern)
    if args.mode == "opt" and args.param not in pattern.parameters:
        raise CliError(f"unknown parameter {args.param!r}", EXIT_ARGUMENT)
    directory = Path(args.words)
    if not directory.is_dir():
        raise CliError(f"{args.words} is not a directory", EXIT_ARGUMENT)
    rows = []
    status = EXIT_OK
    print(_row(BENCH_HEADER))
    for path in sorted(directory.glob("*.tw")):
        try:
            t0 = time.perf_counter()
            word = load_word(str(path))
            parsing = time.perf_counter() - t0
            if args.mode == "opt":
                r = ptpm_opt(pattern, word, args.param, args.direction)
                states, matches, comp = r.states, "", r.comp_seconds
            else:
                m = ptpm(pattern, word, EngineOptions(subsumption=args.subsumption))
                states, matches, comp = m.states, m.matches, m.comp_seconds
        except CliError as exc:
            print(f"error: {exc}", file=sys.stderr)
            status = status or exc.code
            continue
        except PatternError as exc:
            print(f"error: {path}: ill-formed pattern: {exc}", file=sys.stderr)
            status = status or EXIT_PATTERN
            continue
        row = (path.name, len(word), states, matches, _fmt_seconds(parsing), _fmt_seconds(comp))
        rows.append(row)
        print(_row(row), flush=True)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(BENCH_HEADER)
            writer.writerows(rows)
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptpm", description="Parametric timed pattern matching.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", help="all matches with their parameter constraints")
    p.add_argument("--pattern", required=True, help="pattern .pat.json file or builtin:NAME")
    p.add_argument("--word", required=True, help="timed word .tw file")
    p.add_argument("--valuation", help="fix parameters, e.g. p1=1,p2=1")
    p.add_argument("--subsumption", action="store_true", help="drop disjuncts covered by earlier ones")
    p.add_argument("--out", help="write the .match.json result here")
    p.add_argument("--show", action="store_true", help="print the disjuncts")
    p.add_argument("--raw", action="store_true", help="skip redundancy removal in the output")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("opt", help="best value of one parameter over all matches")
    p.add_argument("--pattern", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--param", required=True)
    p.add_argument("--direction", choices=(MIN, MAX), default=MIN)
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("oracle", help="brute-force match set at one valuation")
    p.add_argument("--pattern", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--valuation", required=True)
    p.add_argument("--compare", help="a .match.json result to check against the oracle")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate a benchmark word")
    p.add_argument("kind", choices=("blowup", "gear"))
    p.add_argument("--events", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("project", help="2-D polygons of a stored result, as CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--vars", required=True, help="X,Y")
    p.add_argument("--box", required=True, help="x0,x1,y0,y1")
    p.add_argument("--out")
    p.add_argument("--gnuplot", help="also write a gnuplot script here")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("bench", help="one stats row per .tw file of a directory")
    p.add_argument("--pattern", required=True)
    p.add_argument("--words", required=True)
    p.add_argument("--mode", choices=("match", "opt"), default="match")
    p.add_argument("--param")
    p.add_argument("--direction", choices=(MIN, MAX), default=MIN)
    p.add_argument("--subsumption", action="store_true")
    p.add_argument("--out", help="also write the table as CSV")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ARGUMENT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
