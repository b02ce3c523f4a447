"""Command-line front end: ``heckelab {deg,points,verify,reference}``.

Exit codes: 0 success, 1 operational error, 2 convergence criterion failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .arith import IntMat2, SingularMatrixError
from .driver import DEFAULT_THRESHOLD, SweepSpec, summarize, sweep, to_csv, to_json
from .hecke import CapExceededError, DEFAULT_BFS_CAP, canonicalize, coset_reps, hecke_points, index_via_bfs
from .hyperbolic import DEFAULT_Y_MAX, MeasureConfig, UHPoint
from .observables import DEFAULT_MC_SAMPLES, builtin_family, load_family, reference_family

DEFAULT_BASE_POINTS = ("0.3,1", "0,2", "0.1,5")


class UsageError(Exception):
    pass


def _matrix(text: str) -> tuple[IntMat2, int]:
    body, _, den = text.partition("/")
    try:
        return IntMat2.parse(body), int(den) if den else 1
    except ValueError as exc:
        raise UsageError(f"bad matrix {text!r}: {exc}") from None


def _point(text: str) -> UHPoint:
    try:
        return UHPoint.parse(text)
    except ValueError as exc:
        raise UsageError(f"bad point {text!r}: {exc}") from None


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"bad range {text!r}, expected LO..HI") from None


def _family(arg: str):
    if arg == "default":
        return builtin_family()
    try:
        return load_family(Path(arg).read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot load family {arg!r}: {exc}") from None


def _matrices_file(path: str) -> tuple[IntMat2, ...]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read matrices file: {exc}") from None
    out = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            m, den = _matrix(line)
            out.append(m.scale(-1) if den < 0 else m)
    return tuple(out)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heckelab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("deg", help="degree by enumeration and by BFS")
    d.add_argument("--a", required=True, help="matrix a,b,c,d (optionally /den)")
    d.add_argument("--cap", type=int, default=DEFAULT_BFS_CAP)

    pt = sub.add_parser("points", help="write the reduced Hecke points of a base point")
    pt.add_argument("--a", required=True)
    pt.add_argument("--x", required=True, help="base point x,y")
    pt.add_argument("--out")

    v = sub.add_parser("verify", help="equidistribution sweep")
    seq = v.add_mutually_exclusive_group(required=True)
    seq.add_argument("--primes", help="LO..HI, a = diag(1,p)")
    seq.add_argument("--dets", help="LO..HI, a = diag(1,n)")
    seq.add_argument("--matrices", help="file with one a,b,c,d per line")
    v.add_argument("--x", action="append", help="base point x,y (repeatable, or ';'-separated)")
    v.add_argument("--family", default="default")
    v.add_argument("--samples", type=int, default=DEFAULT_MC_SAMPLES)
    v.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    v.add_argument("--timing", action="store_true", help="fill the millis column (breaks byte-identity)")
    _common(v)

    r = sub.add_parser("reference", help="reference integrals of a test family")
    r.add_argument("--family", default="default")
    r.add_argument("--samples", type=int, default=DEFAULT_MC_SAMPLES)
    _common(r)
    return p


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1, help="worker processes, 0 = auto")
    p.add_argument("--y-max", type=float, default=DEFAULT_Y_MAX)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _measure(args) -> MeasureConfig:
    if not 0 <= args.seed < 2**64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    if args.threads < 0:
        raise UsageError("threads must be >= 0")
    if not args.samples >= 2:
        raise UsageError("samples must be >= 2")
    return MeasureConfig(seed=args.seed, y_max=args.y_max)


def cmd_deg(args) -> int:
    m, den = _matrix(args.a)
    a = canonicalize(m, den)
    n = coset_reps(a).degree
    bfs = index_via_bfs(a, args.cap)
    dt = a.divisor_type
    print(f"degree={n} bfs={bfs} type=({dt.d1},{dt.d2})")
    return 0 if n == bfs else 1


def cmd_points(args) -> int:
    m, den = _matrix(args.a)
    z = _point(args.x)
    a = canonicalize(m, den)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rep", "x", "y"])
    for r, p in zip(coset_reps(a).reps, hecke_points(a, z)):
        w.writerow([r.format(), repr(p.x), repr(p.y)])
    _write(buf.getvalue(), args.out)
    return 0


def cmd_verify(args) -> int:
    texts = args.x or list(DEFAULT_BASE_POINTS)
    points = tuple(_point(t) for arg in texts for t in arg.split(";") if t)
    family = tuple(_family(args.family))
    cfg = _measure(args)
    kw = dict(base_points=points, family=family, measure=cfg, n_samples=args.samples)
    if args.primes:
        lo, hi = _range(args.primes)
        spec = SweepSpec("primes", lo=lo, hi=hi, **kw)
    elif args.dets:
        lo, hi = _range(args.dets)
        spec = SweepSpec("dets", lo=lo, hi=hi, **kw)
    else:
        spec = SweepSpec("matrices", matrices=_matrices_file(args.matrices), **kw)
    if not spec.items():
        print("warning: empty sequence, writing an empty report", file=sys.stderr)
        _write(to_csv([]) if args.format == "csv" else to_json([]), args.out)
        return 0
    reports = sweep(spec, threads=args.threads, timing=args.timing)
    _write(to_csv(reports) if args.format == "csv" else to_json(reports), args.out)
    summaries = summarize(reports, threshold=args.threshold)
    for s in summaries:
        print(s.line(), file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return 0 if all(s.ok for s in summaries) else 2


def cmd_reference(args) -> int:
    family = _family(args.family)
    cfg = _measure(args)
    refs = reference_family(family, cfg, args.samples)
    rows = [{"label": f.label, "value": repr(r.value), "error_bar": repr(r.error_bar),
             "method": r.method, "monte_carlo": repr(r.monte_carlo), "mc_stderr": repr(r.mc_stderr)}
            for f, r in zip(family, refs)]
    if args.format == "json":
        _write(json.dumps(rows, indent=1) + "\n", args.out)
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        _write(buf.getvalue(), args.out)
    return 0


COMMANDS = {"deg": cmd_deg, "points": cmd_points, "verify": cmd_verify, "reference": cmd_reference}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SingularMatrixError, CapExceededError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
