"""syncwalk command line.

Exit codes: 0 success, 2 domain error, 3 not synchronizing, 4 resource
exceeded, 5 verification mismatch, 6 truncation refusal.

Examples
--------
  syncwalk gen --family cerny --n 7 --out c7.json
  syncwalk expected --family un --n 7 --p 1/2
  syncwalk expected --family cerny --n 3 --p 1/2 --start pair:1,2
  syncwalk verify --family cerny un --n 3..11:2 --p 1/3 1/2
  syncwalk simulate --family un --n 3 --p 0.5 --trials 100000 --seed 42
  syncwalk sweep --family cerny --n 11 --start pair:1,6 --step 0.001
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import closed_forms
from .analysis import reset_threshold
from .automaton import StateSet, dumps, load, to_dot, validate
from .errors import (
    DomainError, EstimateTruncated, NotAbsorbing, NotSynchronizing,
    PairNotSynchronizable, ResourceExceeded, SingularSystem, SyncError, TruncationRefused,
)
from .generators import gen_cerny, gen_pn, gen_un, normalize_pair, pair_automaton
from .markov import (
    LetterDistribution, argmax_pair, build_pair_chain, build_subset_chain,
    expected_pair_time, expected_sync_time, solve_expected,
)
from .montecarlo import DEFAULT_MAX_STEPS, estimate

EXIT_OK, EXIT_DOMAIN, EXIT_NOT_SYNC, EXIT_RESOURCE, EXIT_MISMATCH, EXIT_TRUNCATION = 0, 2, 3, 4, 5, 6
FLOAT_REL_TOL = 1e-9


class Mismatch(SyncError):
    pass


def fmt(value) -> str:
    """Rationals as ``num/den`` (bare integers when whole), floats as repr."""
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    return repr(float(value))


def cell(value) -> str:
    """CSV form: rationals always ``num/den``, floats as repr."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


def parse_range(text: str) -> list[int]:
    """``"7"``, ``"3..11"`` or ``"3..11:2"`` (inclusive, optional step)."""
    try:
        body, _, step = text.partition(":")
        lo, sep, hi = body.partition("..")
        lo = int(lo)
        hi = int(hi) if sep else lo
        step = int(step) if step else 1
    except ValueError:
        raise DomainError(f"bad range {text!r}") from None
    if step < 1 or hi < lo:
        raise DomainError(f"empty range {text!r}")
    return list(range(lo, hi + 1, step))


def parse_number(text: str):
    text = text.strip()
    try:
        return Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"cannot parse number {text!r}") from None


def parse_start(text: str, num_states: int):
    """``all``, ``pair:s,t`` or ``set:s1,s2,...``; returns ("all"|"pair"|"set", value)."""
    if text == "all":
        return "all", None
    kind, _, body = text.partition(":")
    try:
        members = [int(v) for v in body.split(",")] if body else []
    except ValueError:
        raise DomainError(f"bad start {text!r}") from None
    if kind == "pair":
        return "pair", normalize_pair(members, num_states)
    if kind == "set" and members:
        return "set", StateSet.of(members, num_states)
    raise DomainError(f"bad start {text!r}; use all, pair:s,t or set:s,...")


def build_family(family: str | None, n: int | None, path: str | None):
    if family in (None, "file"):
        if not path:
            raise DomainError("--file is required for family 'file'")
        return load(path)
    if n is None:
        raise DomainError("--n is required")
    if family == "cerny":
        return gen_cerny(n)
    if family == "un":
        return gen_un(n)
    if family == "pn":
        return gen_pn(n)
    if family == "pair-cerny":
        return pair_automaton(gen_cerny(n))
    raise DomainError(f"unknown family {family!r}")


def write_text(text: str, out: str | None, stdout) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


def csv_text(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


# -- commands ------------------------------------------------------------------

def cmd_gen(args, out):
    A = build_family(args.family, args.n, None)
    write_text(dumps(A), args.out, out)


def cmd_validate(args, out):
    try:
        doc = json.loads(Path(args.file).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read {args.file}: {exc}") from None
    problems = validate(doc)
    if problems:
        raise DomainError("\n".join(problems))
    out.write("ok\n")


def cmd_reset_threshold(args, out):
    A = build_family(args.family, args.n, args.file)
    report = reset_threshold(A, cap=args.cap)
    out.write(json.dumps(report.to_json(A)) + "\n")


def _expectation(A, d, start_kind, start, cap=None):
    if start_kind == "pair":
        return solve_expected(build_pair_chain(A, d, start)).at_start
    chain = build_subset_chain(A, d, start, cap=cap)
    try:
        return solve_expected(chain).at_start
    except NotAbsorbing:
        raise NotSynchronizing("the start set never shrinks to a singleton") from None


def cmd_expected(args, out):
    A = build_family(args.family, args.n, args.file)
    d = LetterDistribution.parse(args.p)
    if args.exact and not d.exact:
        raise DomainError("--exact needs a rational probability such as 1/2")
    kind, start = parse_start(args.start, A.num_states)
    value = _expectation(A, d, kind, start, cap=args.cap)
    path = "exact" if d.exact else "float"
    out.write(f"expected: {fmt(value)}\nfloat: {float(value)!r}\npath: {path}\n")
    if args.out:
        rows = [
            ["family", "n", "p", "start", "path", "expected_exact", "expected_float"],
            [A.meta.get("family", "file"), A.meta.get("n", ""), cell(d.p), args.start, path,
             cell(value) if d.exact else "", repr(float(value))],
        ]
        Path(args.out).write_text(csv_text(rows), encoding="utf-8")


def cmd_argmax_pair(args, out):
    A = build_family(args.family, args.n, args.file)
    d = LetterDistribution.parse(args.p)
    (s, t), value = argmax_pair(A, d)
    out.write(f"pair: {s},{t}\nexpected: {fmt(value)}\npath: {'exact' if d.exact else 'float'}\n")


def _verify_cell(family, n, d):
    if family == "un":
        closed = closed_forms.un_expected(n, d.p)
        solved = expected_sync_time(gen_un(n), d)
    elif family == "cerny":
        closed = closed_forms.cerny_expected(n, d.p)
        solved = expected_pair_time(gen_cerny(n), d, closed_forms.cerny_extremal_pair(n))
    else:
        raise DomainError(f"verify supports families cerny and un, not {family!r}")
    diff = abs(float(closed) - float(solved))
    if d.exact:
        equal = closed == solved
    else:
        equal = diff <= FLOAT_REL_TOL * max(1.0, abs(float(closed)))
    return closed, solved, equal, diff


def cmd_verify(args, out):
    ns = parse_range(args.n)
    dists = [LetterDistribution.parse(p) for p in args.p]
    rows = [["family", "n", "p", "closed_form", "solver_value", "equal", "abs_diff_float"]]
    first_bad = None
    for family in args.family:
        for n in ns:
            for d in dists:
                closed, solved, equal, diff = _verify_cell(family, n, d)
                rows.append([family, n, cell(d.p), cell(closed), cell(solved),
                             "true" if equal else "false", repr(diff)])
                if not equal and first_bad is None:
                    first_bad = (family, n, d.p, closed, solved)
    write_text(csv_text(rows), args.out, out)
    if first_bad:
        family, n, p, closed, solved = first_bad
        raise Mismatch(
            f"mismatch: {family} n={n} p={fmt(p)}: closed form {fmt(closed)} != solver {fmt(solved)}"
        )


def cmd_simulate(args, out):
    A = build_family(args.family, args.n, args.file)
    p = parse_number(args.p)
    kind, start = parse_start(args.start, A.num_states)
    if kind == "pair":
        start = StateSet.of(start, A.num_states)
    est = estimate(A, float(p), start=start, trials=args.trials, seed=args.seed,
                   max_steps=args.max_steps, cap=args.cap)
    out.write(json.dumps(est.to_json(), sort_keys=True) + "\n")


def _grid(args):
    if args.p_values:
        values = [parse_number(v) for v in args.p_values]
    elif args.grid:
        parts = args.grid.split(":")
        if len(parts) != 3:
            raise DomainError("--grid takes lo:hi:step")
        lo, hi, step = (parse_number(v) for v in parts)
        if step <= 0:
            raise DomainError("grid step must be positive")
        values = []
        k = 0
        while lo + k * step <= hi + (1e-12 if isinstance(step, float) else 0):
            values.append(lo + k * step)
            k += 1
    else:
        values = closed_forms.p_grid(parse_number(args.step))
    if not values:
        raise DomainError("empty probability grid")
    for v in values:
        if not 0 < v < 1:
            raise DomainError(f"grid value {v} outside (0, 1)")
    return values


def cmd_sweep(args, out):
    A = build_family(args.family, args.n, args.file)
    kind, start = parse_start(args.start, A.num_states)
    values = _grid(args)
    rows = [["kind", "p", "expected", "path"]]
    best = None
    for p in values:
        d = LetterDistribution(p)
        value = _expectation(A, d, kind, start, cap=args.cap)
        rows.append(["point", cell(d.p), cell(value), "exact" if d.exact else "float"])
        if best is None or value < best[1]:
            best = (d, value)
    d, value = best
    rows.append(["argmin", cell(d.p), cell(value), "exact" if d.exact else "float"])
    write_text(csv_text(rows), args.out, out)


def cmd_export_dot(args, out):
    A = build_family(args.family, args.n, args.file)
    name = f"{A.meta.get('family', 'automaton')}{A.meta.get('n', '')}"
    write_text(to_dot(A, name), args.out, out)


# -- parser --------------------------------------------------------------------

def _source(p, families=("cerny", "un", "pn", "pair-cerny", "file")):
    p.add_argument("--family", choices=families, default=None)
    p.add_argument("--n", type=int)
    p.add_argument("--file", help="automaton JSON file")


def _cap(p):
    p.add_argument("--cap", type=int, default=None,
                   help="subset cap (default 2000000 or $SYNCWALK_CAP)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="syncwalk", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a generated automaton as JSON")
    p.add_argument("--family", required=True, choices=("cerny", "un", "pn", "pair-cerny"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("validate", help="check an automaton file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("reset-threshold", help="shortest reset word by subset BFS")
    _source(p); _cap(p)
    p.set_defaults(func=cmd_reset_threshold)

    p = sub.add_parser("expected", help="exact expected synchronization time")
    _source(p); _cap(p)
    p.add_argument("--p", required=True, help="probability of letter a, m/k or decimal")
    p.add_argument("--start", default="all")
    p.add_argument("--exact", action="store_true", help="refuse the float path")
    p.add_argument("--out", help="also write a CSV row here")
    p.set_defaults(func=cmd_expected)

    p = sub.add_parser("argmax-pair", help="pair with the largest expected merging time")
    _source(p)
    p.add_argument("--p", required=True)
    p.set_defaults(func=cmd_argmax_pair)

    p = sub.add_parser("verify", help="closed forms against the exact solver")
    p.add_argument("--family", nargs="+", choices=("cerny", "un"), required=True)
    p.add_argument("--n", required=True, help="range lo..hi[:step]")
    p.add_argument("--p", nargs="+", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo estimate")
    _source(p); _cap(p)
    p.add_argument("--p", required=True)
    p.add_argument("--start", default="all")
    p.add_argument("--trials", type=lambda s: int(float(s)), default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=lambda s: int(float(s)), default=DEFAULT_MAX_STEPS)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="expectation over a grid of p")
    _source(p); _cap(p)
    p.add_argument("--start", default="all")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--step", default="0.001", help="grid step over (0, 1)")
    g.add_argument("--grid", help="lo:hi:step, inclusive")
    g.add_argument("--p-values", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-dot", help="Graphviz rendering")
    _source(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_dot)
    return ap


EXIT_CODES = [
    ((TruncationRefused, EstimateTruncated), EXIT_TRUNCATION),
    ((Mismatch,), EXIT_MISMATCH),
    ((ResourceExceeded, SingularSystem), EXIT_RESOURCE),
    ((NotSynchronizing, PairNotSynchronizable, NotAbsorbing), EXIT_NOT_SYNC),
    ((DomainError,), EXIT_DOMAIN),
]


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        args.func(args, stdout)
    except SyncError as exc:
        for kinds, code in EXIT_CODES:
            if isinstance(exc, kinds):
                stderr.write(f"syncwalk {args.command}: {exc}\n")
                return code
        raise
    except OSError as exc:
        stderr.write(f"syncwalk {args.command}: {exc}\n")
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
