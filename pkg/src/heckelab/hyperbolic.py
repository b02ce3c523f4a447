"""Upper half-plane geometry and the normalized measure on the modular surface.

Geometry runs in double precision.  Reduction uses the standard
translate-then-invert loop followed by boundary tie rules, so every orbit has
a single representative: x = +1/2 goes to -1/2 and points of the unit arc
with x > 0 go to the mirror point with x < 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .arith import IntMat2, det

EPS_RED = 1e-12
MAX_REDUCE_ITER = 10_000
DEFAULT_Y_MAX = 1e3
SQRT3_2 = math.sqrt(3.0) / 2.0
# Unnormalized area of the fundamental domain is pi/3.
NORMALIZATION = 3.0 / math.pi
SAMPLE_CHUNK = 1 << 16


class ReductionError(RuntimeError):
    pass


class QuadratureError(RuntimeError):
    def __init__(self, message: str, partial: float):
        super().__init__(f"{message} (partial estimate {partial!r})")
        self.partial = partial


@dataclass(frozen=True, slots=True)
class UHPoint:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not self.y > 0:
            raise ValueError(f"point must lie in the upper half-plane, got y={self.y!r}")

    @classmethod
    def parse(cls, text: str) -> "UHPoint":
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 'x,y', got {text!r}")
        return cls(float(parts[0]), float(parts[1]))

    def format(self) -> str:
        return f"{self.x!r},{self.y!r}"


@dataclass(frozen=True, slots=True)
class ReducedPoint:
    point: UHPoint

    @property
    def x(self) -> float:
        return self.point.x

    @property
    def y(self) -> float:
        return self.point.y


@dataclass(frozen=True)
class MeasureConfig:
    normalization: float = NORMALIZATION
    seed: int = 0
    y_max: float = DEFAULT_Y_MAX

    @property
    def tail_mass(self) -> float:
        """Normalized mass of the cusp region y > y_max."""
        return 0.0 if math.isinf(self.y_max) else self.normalization / self.y_max


def mobius(m: IntMat2, z: UHPoint) -> UHPoint:
    n = det(m)
    if n <= 0:
        raise ValueError("mobius action requires det > 0")
    a, b, c, d = (float(e) for e in m)
    dr = c * z.x + d
    di = c * z.y
    den = dr * dr + di * di
    x = ((a * z.x + b) * dr + a * c * z.y * z.y) / den
    return UHPoint(x, float(n) * z.y / den)


def mobius_many(a, b, c, d, x, y) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized mobius over float arrays of matrix entries (det assumed > 0)."""
    a, b, c, d = (np.asarray(v, dtype=np.float64) for v in (a, b, c, d))
    dr = c * x + d
    di = c * y
    den = dr * dr + di * di
    xs = ((a * x + b) * dr + a * c * y * y) / den
    ys = (a * d - b * c) * y / den
    return xs, ys


def _find_gamma(x: float, y: float) -> tuple[int, int, int, int]:
    a, b, c, d = 1, 0, 0, 1
    for _ in range(MAX_REDUCE_ITER):
        n = math.floor(x + 0.5)
        x = x - n
        if n:
            a, b = a - n * c, b - n * d
        r2 = x * x + y * y
        if r2 == 0.0:
            raise ReductionError("y underflow during reduction")
        if r2 < 1.0 - EPS_RED:
            x, y = -x / r2, y / r2
            a, b, c, d = -c, -d, a, b
        else:
            return a, b, c, d
    raise ReductionError("reduction iteration cap exceeded")


def reduce(z: UHPoint) -> tuple[ReducedPoint, IntMat2]:
    """Reduce z into the fundamental domain; returns the point and gamma with gamma.z = point.

    The float loop only chooses gamma; the returned point is recomputed as one
    Mobius evaluation of the exact integer gamma, so the witness is exact by
    construction and rounding does not accumulate over iterations.
    """
    g = IntMat2(*_find_gamma(z.x, z.y))
    w = mobius(g, z)
    if w.x > 0.5 - EPS_RED:
        g = IntMat2(g.a - g.c, g.b - g.d, g.c, g.d)
        w = mobius(g, z)
    if w.x > 0.0 and abs(w.x * w.x + w.y * w.y - 1.0) <= EPS_RED:
        g = IntMat2(-g.c, -g.d, g.a, g.b)
        w = mobius(g, z)
    # + 0.0 folds -0.0 into 0.0 so output text is canonical.
    return ReducedPoint(UHPoint(w.x + 0.0, w.y)), g


def reduce_many(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``reduce`` returning coordinates only.

    Same decisions and float operations as ``reduce``; gamma is carried in
    float64, which is exact while its entries stay below 2**53.
    """
    x0 = np.array(xs, dtype=np.float64).ravel()
    y0 = np.array(ys, dtype=np.float64).ravel()
    x, y = x0.copy(), y0.copy()
    a, b = np.ones_like(x), np.zeros_like(x)
    c, d = np.zeros_like(x), np.ones_like(x)
    active = np.arange(x.size)
    for _ in range(MAX_REDUCE_ITER):
        if active.size == 0:
            break
        xa, ya = x[active], y[active]
        n = np.floor(xa + 0.5)
        xa = xa - n
        ca, da = c[active], d[active]
        aa, ba = a[active] - n * ca, b[active] - n * da
        r2 = xa * xa + ya * ya
        if not r2.all():
            raise ReductionError("y underflow during reduction")
        inv = r2 < 1.0 - EPS_RED
        x[active] = np.where(inv, -xa / r2, xa)
        y[active] = np.where(inv, ya / r2, ya)
        a[active] = np.where(inv, -ca, aa)
        b[active] = np.where(inv, -da, ba)
        c[active] = np.where(inv, aa, ca)
        d[active] = np.where(inv, ba, da)
        active = active[inv]
    else:
        raise ReductionError("reduction iteration cap exceeded")
    x, y = mobius_many(a, b, c, d, x0, y0)
    shift = x > 0.5 - EPS_RED
    if shift.any():
        a, b = np.where(shift, a - c, a), np.where(shift, b - d, b)
        x, y = mobius_many(a, b, c, d, x0, y0)
    flip = (x > 0.0) & (np.abs(x * x + y * y - 1.0) <= EPS_RED)
    if flip.any():
        a, b, c, d = (np.where(flip, -c, a), np.where(flip, -d, b),
                      np.where(flip, a, c), np.where(flip, b, d))
        x, y = mobius_many(a, b, c, d, x0, y0)
    return x + 0.0, y


def hyp_dist(z1: UHPoint, z2: UHPoint) -> float:
    dx, dy = z1.x - z2.x, z1.y - z2.y
    return math.acosh(1.0 + (dx * dx + dy * dy) / (2.0 * z1.y * z2.y))


def hyp_dist_many(x1, y1, x2, y2) -> np.ndarray:
    dx, dy = x1 - x2, y1 - y2
    return np.arccosh(1.0 + (dx * dx + dy * dy) / (2.0 * y1 * y2))


def in_fundamental_domain(x, y, eps: float = EPS_RED):
    return (np.abs(x) <= 0.5 + eps) & (x * x + y * y >= 1.0 - eps)


def mu_sample_arrays(cfg: MeasureConfig, n: int) -> tuple[np.ndarray, np.ndarray]:
    """n draws from the normalized measure on the fundamental domain.

    Work is cut into fixed-size chunks, chunk k seeded by the k-th child of the
    config seed, so the output does not depend on how chunks are scheduled.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    n_chunks = -(-n // SAMPLE_CHUNK)
    children = np.random.SeedSequence(cfg.seed).spawn(n_chunks)
    xs, ys = [], []
    for k, child in enumerate(children):
        want = min(SAMPLE_CHUNK, n - k * SAMPLE_CHUNK)
        x, y = _sample_chunk(np.random.Generator(np.random.Philox(child)), want)
        xs.append(x)
        ys.append(y)
    return np.concatenate(xs), np.concatenate(ys)


def _sample_chunk(rng: np.random.Generator, want: int) -> tuple[np.ndarray, np.ndarray]:
    got_x, got_y, have = [], [], 0
    while have < want:
        # Acceptance rate on the enclosing strip is (pi/3) / (2/sqrt(3)) ~ 0.907.
        m = int((want - have) * 1.2) + 16
        x = rng.random(m) - 0.5
        # Inverse CDF of density y0/y^2 on [y0, inf); 1 - U avoids U = 0.
        y = SQRT3_2 / (1.0 - rng.random(m))
        keep = x * x + y * y >= 1.0
        got_x.append(x[keep])
        got_y.append(y[keep])
        have += int(keep.sum())
    return np.concatenate(got_x)[:want], np.concatenate(got_y)[:want]


def mu_sample(cfg: MeasureConfig, n: int) -> list[ReducedPoint]:
    xs, ys = mu_sample_arrays(cfg, n)
    return [ReducedPoint(UHPoint(float(x), float(y))) for x, y in zip(xs, ys)]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abserr: float
    tail_bound: float


def mu_quadrature(
    f: Callable[[float, float], float],
    cfg: MeasureConfig,
    *,
    sup_abs: float = 1.0,
    x_breaks: Sequence[float] = (),
    y_breaks: Sequence[float] = (),
    epsabs: float = 1e-6,
) -> QuadratureResult:
    """Integrate f against the normalized measure over the domain, y <= y_max.

    Runs in u = 1/y, where dx dy / y^2 = dx du and the domain becomes
    1/y_max <= u <= 1/sqrt(1 - x^2), so y_max = inf needs no special case.
    The cusp above y_max is bounded by sup_abs * tail mass, not integrated.
    Break lists mark kinks and jumps of f so the adaptive rule splits there.
    """
    u_lo = 0.0 if math.isinf(cfg.y_max) else 1.0 / cfg.y_max
    points = sorted(b for b in set(x_breaks) if -0.5 < b < 0.5) or None
    u_breaks = sorted({1.0 / yb for yb in y_breaks if yb > 0})

    def inner(x: float) -> float:
        u_hi = 1.0 / math.sqrt(1.0 - x * x)
        pts = [u for u in u_breaks if u_lo < u < u_hi] or None
        val, _ = integrate.quad(
            lambda u: f(x, 1.0 / u),
            u_lo,
            u_hi,
            epsabs=epsabs / 10,
            epsrel=0.0,
            limit=200,
            points=pts,
        )
        return val

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        val, err = integrate.quad(
            inner, -0.5, 0.5, epsabs=epsabs, epsrel=0.0, limit=200, points=points
        )
    value = cfg.normalization * val
    if any(issubclass(w.category, integrate.IntegrationWarning) for w in caught):
        raise QuadratureError("quadrature refinement did not converge", value)
    return QuadratureResult(value, cfg.normalization * err, sup_abs * cfg.tail_mass)
