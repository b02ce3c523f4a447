"""Hecke averages, discrepancies and convergence sweeps.

T_a f(z) = (1/deg a) * sum_j f(reduce(r_j . z)) over the coset reps r_j.
A sweep walks a sequence a_1, a_2, ... and records, for every base point,
how far the averages are from the reference integrals.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arith import IDENTITY, S, T, T_INV, IntMat2, mat_mul
from .hecke import HeckeElement, canonicalize, coset_reps, prime_sequence
from .hyperbolic import MeasureConfig, UHPoint, mobius_many, reduce_many
from .observables import (
    DEFAULT_MC_SAMPLES,
    ReferenceIntegral,
    TestFunction,
    builtin_family,
    eval_many,
    reference_family,
)

CSV_COLUMNS = (
    "seq_index", "det", "d1", "d2", "degree", "base_x", "base_y", "f_label",
    "average", "reference", "ref_err", "abs_dev", "sup_dev_flag", "millis", "error",
)
DEFAULT_THRESHOLD = 0.05


def _hecke_xy(a: HeckeElement, z: UHPoint) -> tuple[np.ndarray, np.ndarray]:
    return reduce_many(*mobius_many(*coset_reps(a).arrays(), z.x, z.y))


def hecke_average(a: HeckeElement, f: TestFunction, z: UHPoint) -> float:
    # np.mean on a contiguous float64 array uses pairwise summation.
    return float(np.mean(eval_many(f, *_hecke_xy(a, z))))


def hecke_averages(a: HeckeElement, family: Sequence[TestFunction], z: UHPoint) -> list[float]:
    xs, ys = _hecke_xy(a, z)
    return [float(np.mean(eval_many(f, xs, ys))) for f in family]


def random_word(rng: np.random.Generator, max_len: int) -> IntMat2:
    gens = (S, T, T_INV)
    g = IDENTITY
    for k in rng.integers(0, 3, size=int(rng.integers(0, max_len + 1))):
        g = mat_mul(g, gens[k])
    return g


def representative_invariance_check(
    a: HeckeElement, f: TestFunction, z: UHPoint, trials: int, seed: int = 0, max_len: int = 10
) -> float:
    """Max change of T_a f(z) when each rep r_j is replaced by gamma_j r_j."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    reps = coset_reps(a).reps
    base = hecke_average(a, f, z)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        moved = np.array([mat_mul(random_word(rng, max_len), r) for r in reps], dtype=np.float64)
        xs, ys = reduce_many(*mobius_many(*moved.T, z.x, z.y))
        worst = max(worst, abs(float(np.mean(eval_many(f, xs, ys))) - base))
    return worst


def discrepancy(
    a: HeckeElement,
    family: Sequence[TestFunction],
    z: UHPoint,
    references: Sequence[ReferenceIntegral],
) -> float:
    avgs = hecke_averages(a, family, z)
    return max(abs(v - r.value) for v, r in zip(avgs, references))


@dataclass(frozen=True)
class SweepSpec:
    sequence: str  # "primes", "dets" or "matrices"
    base_points: tuple[UHPoint, ...]
    family: tuple[TestFunction, ...] = field(default_factory=lambda: tuple(builtin_family()))
    measure: MeasureConfig = field(default_factory=MeasureConfig)
    lo: int = 0
    hi: int = -1
    matrices: tuple[IntMat2, ...] = ()
    n_samples: int = DEFAULT_MC_SAMPLES

    def __post_init__(self):
        if self.sequence not in ("primes", "dets", "matrices"):
            raise ValueError(f"unknown sequence kind {self.sequence!r}")
        if not self.base_points:
            raise ValueError("at least one base point is required")
        if not self.family:
            raise ValueError("family must be nonempty")

    def items(self) -> list[IntMat2]:
        if self.sequence == "primes":
            return [IntMat2(1, 0, 0, p) for p in prime_sequence(self.lo, self.hi)]
        if self.sequence == "dets":
            return [IntMat2(1, 0, 0, n) for n in range(max(self.lo, 1), self.hi + 1)]
        return list(self.matrices)


@dataclass
class DiscrepancyReport:
    seq_index: int
    det: int
    d1: int
    d2: int
    degree: int
    base: UHPoint
    labels: list[str]
    averages: list[float]
    references: list[float]
    ref_errs: list[float]
    sup_deviation: float
    millis: int = 0
    error: str = ""

    @property
    def deviations(self) -> list[float]:
        return [abs(v - r) for v, r in zip(self.averages, self.references)]


def _run_item(args) -> list[DiscrepancyReport]:
    index, m, base_points, family, refs, timing = args
    labels = [f.label for f in family]
    ref_vals = [r.value for r in refs]
    ref_errs = [r.error_bar for r in refs]
    try:
        a = canonicalize(m)
    except (ValueError, ArithmeticError) as exc:
        return [
            DiscrepancyReport(index, m.a * m.d - m.b * m.c, 0, 0, 0, z, labels, [], ref_vals,
                              ref_errs, math.nan, 0, str(exc))
            for z in base_points
        ]
    out = []
    for z in base_points:
        t0 = time.perf_counter()
        try:
            avgs = hecke_averages(a, family, z)
            err = ""
        except Exception as exc:  # recorded in the row; the sweep continues
            avgs, err = [], f"{type(exc).__name__}: {exc}"
        millis = int(round((time.perf_counter() - t0) * 1000)) if timing else 0
        sup = max((abs(v - r) for v, r in zip(avgs, ref_vals)), default=math.nan)
        out.append(DiscrepancyReport(index, a.det, a.divisor_type.d1, a.divisor_type.d2,
                                     coset_reps(a).degree, z, labels, avgs, ref_vals, ref_errs,
                                     sup, millis, err))
    return out


def sweep(
    spec: SweepSpec,
    references: Sequence[ReferenceIntegral] | None = None,
    threads: int = 1,
    timing: bool = False,
) -> list[DiscrepancyReport]:
    """Run the sweep; rows come back in sequence order whatever the worker count."""
    if references is None:
        references = reference_family(spec.family, spec.measure, spec.n_samples)
    jobs = [(i, m, spec.base_points, spec.family, tuple(references), timing)
            for i, m in enumerate(spec.items())]
    if threads == 1 or len(jobs) <= 1:
        chunks = map(_run_item, jobs)
        return [r for chunk in chunks for r in chunk]
    with ProcessPoolExecutor(max_workers=threads or None) as pool:
        chunks = pool.map(_run_item, jobs, chunksize=1)
        return [r for chunk in chunks for r in chunk]


def bucket_of(degree: int) -> int | None:
    """Decade bucket k with 10^k <= degree < 10^(k+1); degrees below 10 are unbucketed."""
    if degree < 10:
        return None
    return len(str(degree)) - 1


@dataclass
class BucketSummary:
    base: UHPoint
    medians: dict[int, float]
    final_max: float | None
    monotone: bool
    below_threshold: bool

    @property
    def ok(self) -> bool:
        return self.monotone and self.below_threshold

    def line(self) -> str:
        parts = [f"[{10**k},{10**(k + 1)}):{m:.6f}" for k, m in sorted(self.medians.items())]
        fm = "na" if self.final_max is None else f"{self.final_max:.6f}"
        return (f"x={self.base.format()} medians {' '.join(parts) or 'none'} "
                f"final_max={fm} monotone={'yes' if self.monotone else 'no'}")


def summarize(
    reports: Sequence[DiscrepancyReport], threshold: float = DEFAULT_THRESHOLD, strict: bool = False
) -> list[BucketSummary]:
    """Per base point: bucket medians, final-bucket max and the monotone criterion."""
    by_base: dict[UHPoint, dict[int, list[float]]] = {}
    for r in reports:
        per = by_base.setdefault(r.base, {})
        k = bucket_of(r.degree)
        if k is None or r.error or math.isnan(r.sup_deviation):
            continue
        per.setdefault(k, []).append(r.sup_deviation)
    out = []
    for base, per in by_base.items():
        meds = {k: statistics.median(v) for k, v in sorted(per.items())}
        seq = list(meds.values())
        if strict:
            mono = all(b < a for a, b in zip(seq, seq[1:]))
        else:
            mono = all(b <= a for a, b in zip(seq, seq[1:]))
        final = max(per[max(per)]) if per else None
        out.append(BucketSummary(base, meds, final, mono, final is None or final < threshold))
    return out


def _fmt(v: float) -> str:
    return repr(float(v))


def report_rows(reports: Sequence[DiscrepancyReport]) -> list[dict]:
    rows = []
    for r in reports:
        devs = r.deviations
        n = len(r.labels) if not r.error else 0
        common = {"seq_index": r.seq_index, "det": r.det, "d1": r.d1, "d2": r.d2,
                  "degree": r.degree, "base_x": _fmt(r.base.x), "base_y": _fmt(r.base.y),
                  "millis": r.millis}
        if r.error or not r.averages:
            rows.append({**common, "f_label": "", "average": "", "reference": "",
                         "ref_err": "", "abs_dev": "", "sup_dev_flag": "", "error": r.error})
            continue
        for j in range(n):
            rows.append({**common, "f_label": r.labels[j], "average": _fmt(r.averages[j]),
                         "reference": _fmt(r.references[j]), "ref_err": _fmt(r.ref_errs[j]),
                         "abs_dev": _fmt(devs[j]),
                         "sup_dev_flag": int(devs[j] == r.sup_deviation), "error": ""})
    return rows


def to_csv(reports: Sequence[DiscrepancyReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(report_rows(reports))
    return buf.getvalue()


def to_json(reports: Sequence[DiscrepancyReport]) -> str:
    return json.dumps(report_rows(reports), indent=1) + "\n"


def prime_spec(lo: int, hi: int, base_points: Sequence[UHPoint], **kw) -> SweepSpec:
    return SweepSpec("primes", tuple(base_points), lo=lo, hi=hi, **kw)

