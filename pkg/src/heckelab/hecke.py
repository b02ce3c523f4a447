"""Hecke coset enumeration for SL(2,Z).

A class a in the commensurator is stored by a primitive integer
representative with positive determinant.  Its double coset is determined by
(det, divisor type), so the left cosets Gamma\\Gamma a Gamma are exactly the
Hermite forms of that determinant whose Smith form matches.
"""

from __future__ import annotations

import json
import os
import threading
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from pathlib import Path
from typing import Sequence

import numpy as np

from .arith import (
    S,
    T,
    T_INV,
    DivisorType,
    IntMat2,
    SingularMatrixError,
    content,
    det,
    hnf,
    mat_mul,
    snf,
)
from .hyperbolic import ReducedPoint, UHPoint, mobius_many, reduce_many

DEFAULT_BFS_CAP = 10**6
CACHE_ENV = "HECKELAB_CACHE_DIR"


class OrientationError(ValueError):
    pass


class CapExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class HeckeElement:
    rep: IntMat2
    divisor_type: DivisorType

    @property
    def det(self) -> int:
        return det(self.rep)

    def key(self) -> tuple[int, int, int]:
        return (self.det, self.divisor_type.d1, self.divisor_type.d2)


def canonicalize(m: IntMat2, denominator: int = 1) -> HeckeElement:
    """Primitive, positive-determinant representative of m/denominator mod scalars."""
    if denominator == 0:
        raise ValueError("zero denominator")
    # Positive scalars act trivially, so m/den and m share a class; only the
    # sign of the denominator matters for orientation.
    if denominator < 0:
        m = m.scale(-1)
    n = det(m)
    if n == 0:
        raise SingularMatrixError("singular matrix")
    g = content(m)
    rep = IntMat2(*(e // g for e in m))
    if det(rep) < 0:
        raise OrientationError("orientation-reversing class unsupported")
    return HeckeElement(rep, snf(rep))


def canonicalize_rational(entries: Sequence[Fraction | int]) -> HeckeElement:
    fr = [Fraction(e) for e in entries]
    den = 1
    for f in fr:
        den = den * f.denominator // gcd(den, f.denominator)
    return canonicalize(IntMat2(*(int(f * den) for f in fr)))


def diag(d1: int, d2: int) -> HeckeElement:
    return canonicalize(IntMat2(d1, 0, 0, d2))


@dataclass(frozen=True)
class CosetList:
    element: HeckeElement
    reps: tuple[IntMat2, ...]

    @property
    def degree(self) -> int:
        return len(self.reps)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Float64 columns (a, b, c, d) of the reps, for vectorized Mobius maps."""
        arr = np.array(self.reps, dtype=np.float64).reshape(-1, 4)
        return arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]

    def to_json(self) -> dict:
        dt = self.element.divisor_type
        return {
            "det": self.element.det,
            "d1": dt.d1,
            "d2": dt.d2,
            "degree": self.degree,
            "reps": [r.format() for r in self.reps],
        }

    @classmethod
    def from_json(cls, record: dict) -> "CosetList":
        reps = tuple(IntMat2.parse(r) for r in record["reps"])
        if len(reps) != record["degree"]:
            raise ValueError("degree does not match number of reps")
        element = HeckeElement(
            IntMat2(record["d1"], 0, 0, record["d2"]),
            DivisorType(record["d1"], record["d2"]),
        )
        if element.det != record["det"]:
            raise ValueError("det does not match divisor type")
        return cls(element, reps)


def _divisors(n: int) -> list[int]:
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def _enumerate(n: int, d1: int) -> tuple[IntMat2, ...]:
    reps = []
    for r in _divisors(n):
        t = n // r
        g_rt = gcd(r, t)
        if g_rt % d1:
            continue
        if d1 == 1 and g_rt == 1:
            reps.extend(IntMat2(r, s, 0, t) for s in range(t))
            continue
        for s in range(t):
            if gcd(g_rt, s) == d1:
                reps.append(IntMat2(r, s, 0, t))
    return tuple(reps)


_disk_lock = threading.Lock()


def _cache_path(key: tuple[int, int, int]) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    return Path(root) / f"cosets_{key[0]}_{key[1]}_{key[2]}.json"


@lru_cache(maxsize=256)
def _cached_reps(n: int, d1: int, d2: int) -> tuple[IntMat2, ...]:
    path = _cache_path((n, d1, d2))
    if path is not None and path.exists():
        return CosetList.from_json(json.loads(path.read_text("utf-8"))).reps
    reps = _enumerate(n, d1)
    if path is not None:
        record = CosetList(HeckeElement(IntMat2(d1, 0, 0, d2), DivisorType(d1, d2)), reps)
        with _disk_lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(record.to_json()), encoding="utf-8", newline="\n")
            tmp.replace(path)
    return reps


def coset_reps(a: HeckeElement) -> CosetList:
    """Left-coset representatives of Gamma a Gamma in HNF, lexicographic in (r, s)."""
    return CosetList(a, _cached_reps(*a.key()))


def degree(a: HeckeElement) -> int:
    return coset_reps(a).degree


def bfs_cosets(a: HeckeElement, cap: int = DEFAULT_BFS_CAP) -> set[IntMat2]:
    """Orbit of the coset Gamma a under right multiplication by Gamma.

    Its size is the index [Gamma : Gamma cap a^-1 Gamma a].
    """
    start = hnf(a.rep)
    seen = {start}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for g in (S, T, T_INV):
            nxt = hnf(mat_mul(state, g))
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > cap:
                    raise CapExceededError("cap exceeded")
                queue.append(nxt)
    return seen


def index_via_bfs(a: HeckeElement, cap: int = DEFAULT_BFS_CAP) -> int:
    return len(bfs_cosets(a, cap))


def hecke_points(a: HeckeElement, z: UHPoint) -> list[ReducedPoint]:
    """Reduced images r_j . z, one per coset representative, in rep order."""
    cl = coset_reps(a)
    xs, ys = reduce_many(*mobius_many(*cl.arrays(), z.x, z.y))
    return [ReducedPoint(UHPoint(float(x), float(y))) for x, y in zip(xs, ys)]


def prime_sequence(lo: int, hi: int) -> list[int]:
    if hi < 2 or hi < lo:
        return []
    sieve = np.ones(hi + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(hi**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.nonzero(sieve)[0] if p >= lo]
