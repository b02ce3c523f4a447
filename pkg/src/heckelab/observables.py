"""Bounded continuous test functions on the modular surface.

Every function is evaluated on reduced coordinates and is a smoothed
indicator: with signed depth t inside the region (negative outside) and
smoothing width w, the value is clip(1/2 + t/w, 0, 1).  So it is 1 once
t >= w/2, 0 once t <= -w/2, and linear in between.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .hyperbolic import (
    MeasureConfig,
    ReducedPoint,
    hyp_dist_many,
    mu_quadrature,
    mu_sample_arrays,
)

KINDS = ("bump", "box", "height_cutoff", "constant")
DEFAULT_WIDTH = 0.05
DEFAULT_MC_SAMPLES = 10**6
QUAD_TOL = 1e-6

_REQUIRED = {
    "bump": ("cx", "cy", "radius", "width"),
    "box": ("x0", "x1", "y0", "y1", "width"),
    "height_cutoff": ("threshold", "width"),
    "constant": (),
}


class ReferenceInconsistentError(RuntimeError):
    pass


@dataclass(frozen=True)
class TestFunction:
    kind: str
    params: dict = field(default_factory=dict)
    label: str = ""

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown test function kind {self.kind!r}")
        missing = [k for k in _REQUIRED[self.kind] if k not in self.params]
        if missing:
            raise ValueError(f"{self.kind} is missing params {missing}")
        if self.kind != "constant" and not self.params["width"] > 0:
            raise ValueError("smoothing width must be positive")
        if self.kind == "bump" and not self.params["cy"] > 0:
            raise ValueError("bump center must lie in the upper half-plane")
        if not self.label:
            object.__setattr__(self, "label", self.kind)

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items())), self.label))

    def __call__(self, x: float, y: float) -> float:
        return evaluate_xy(self, x, y)

    @property
    def x_breaks(self) -> tuple[float, ...]:
        if self.kind != "box":
            return ()
        p = self.params
        h = p["width"] / 2
        return (p["x0"] - h, p["x0"] + h, p["x1"] - h, p["x1"] + h)

    @property
    def y_breaks(self) -> tuple[float, ...]:
        p = self.params
        if self.kind == "height_cutoff":
            h = p["width"] / 2
            return (p["threshold"] - h, p["threshold"] + h)
        if self.kind == "box":
            h = p["width"] / 2
            return (p["y0"] - h, p["y0"] + h, p["y1"] - h, p["y1"] + h)
        if self.kind == "bump":
            h = p["width"] / 2
            return tuple(p["cy"] * math.exp(s * (p["radius"] + e))
                         for s in (-1, 1) for e in (-h, h) if p["radius"] + e > 0)
        return ()

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "label": self.label}

    @classmethod
    def from_json(cls, record: dict) -> "TestFunction":
        return cls(record["kind"], {k: float(v) for k, v in record.get("params", {}).items()},
                   record.get("label", ""))


def _ramp(depth: float, width: float) -> float:
    return min(1.0, max(0.0, 0.5 + depth / width))


def evaluate_xy(f: TestFunction, x: float, y: float) -> float:
    p = f.params
    if f.kind == "constant":
        return 1.0
    if f.kind == "height_cutoff":
        return _ramp(y - p["threshold"], p["width"])
    if f.kind == "box":
        depth = min(x - p["x0"], p["x1"] - x, y - p["y0"], p["y1"] - y)
        return _ramp(depth, p["width"])
    dx, dy = x - p["cx"], y - p["cy"]
    dist = math.acosh(1.0 + (dx * dx + dy * dy) / (2.0 * y * p["cy"]))
    return _ramp(p["radius"] - dist, p["width"])


def eval(f: TestFunction, z: ReducedPoint) -> float:  # noqa: A001
    return evaluate_xy(f, z.x, z.y)


def eval_many(f: TestFunction, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized ``eval`` on arrays of reduced coordinates."""
    p = f.params
    if f.kind == "constant":
        return np.ones_like(xs, dtype=np.float64)
    if f.kind == "height_cutoff":
        depth = ys - p["threshold"]
    elif f.kind == "box":
        depth = np.minimum(np.minimum(xs - p["x0"], p["x1"] - xs),
                           np.minimum(ys - p["y0"], p["y1"] - ys))
    else:
        depth = p["radius"] - hyp_dist_many(xs, ys, p["cx"], p["cy"])
    return np.clip(0.5 + depth / p["width"], 0.0, 1.0)


def constant() -> TestFunction:
    return TestFunction("constant", {}, "constant")


def height_cutoff(threshold: float, width: float = DEFAULT_WIDTH, label: str = "") -> TestFunction:
    return TestFunction("height_cutoff", {"threshold": threshold, "width": width},
                        label or f"height>{threshold:.4g}")


def box(x0, x1, y0, y1, width: float = DEFAULT_WIDTH, label: str = "") -> TestFunction:
    return TestFunction("box", {"x0": x0, "x1": x1, "y0": y0, "y1": y1, "width": width},
                        label or f"box[{x0:g},{x1:g}]x[{y0:g},{y1:g}]")


def bump(cx, cy, radius, width: float = DEFAULT_WIDTH, label: str = "") -> TestFunction:
    return TestFunction("bump", {"cx": cx, "cy": cy, "radius": radius, "width": width},
                        label or f"bump({cx:g},{cy:.4g};r={radius:g})")


def builtin_family(width: float = DEFAULT_WIDTH) -> list[TestFunction]:
    """Fixed ten-function family covering the cusp, the bulk and the boundary."""
    fam = [
        constant(),
        height_cutoff(math.sqrt(3.0), width, "height>sqrt3"),
        height_cutoff(2.0, width, "height>2"),
        box(-0.4, -0.1, 0.9, 1.5, width),
        box(0.05, 0.45, 1.2, 3.0, width),
    ]
    fam += [bump(0.0, math.exp(k / 2), 0.5, width, f"bump(i*e^({k}/2))") for k in range(5)]
    return fam


def dump_family(family: Iterable[TestFunction]) -> str:
    return json.dumps([f.to_json() for f in family], indent=2)


def load_family(text: str) -> list[TestFunction]:
    records = json.loads(text)
    if not isinstance(records, list) or not records:
        raise ValueError("family must be a nonempty JSON list")
    return [TestFunction.from_json(r) for r in records]


@dataclass(frozen=True)
class ReferenceIntegral:
    value: float
    error_bar: float
    method: str = "quadrature"
    monte_carlo: float | None = None
    mc_stderr: float | None = None

    def __post_init__(self):
        if self.method not in ("quadrature", "monte_carlo", "analytic"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.error_bar < 0:
            raise ValueError("error_bar must be nonnegative")


def monte_carlo(f: TestFunction, xs: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    vals = eval_many(f, xs, ys)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


def reference(
    f: TestFunction,
    cfg: MeasureConfig,
    n_samples: int = DEFAULT_MC_SAMPLES,
    samples: tuple[np.ndarray, np.ndarray] | None = None,
) -> ReferenceIntegral:
    """Quadrature value of the integral of f, cross-checked by Monte Carlo.

    error_bar = quadrature tolerance + cusp tail bound + 3 Monte Carlo standard errors.
    """
    q = mu_quadrature(f, cfg, sup_abs=1.0, x_breaks=f.x_breaks, y_breaks=f.y_breaks,
                      epsabs=QUAD_TOL)
    if samples is None:
        samples = mu_sample_arrays(cfg, n_samples)
    mc, se = monte_carlo(f, *samples)
    error_bar = max(q.abserr, QUAD_TOL) + q.tail_bound + 3.0 * se
    if abs(q.value - mc) > error_bar:
        raise ReferenceInconsistentError(
            f"reference integral inconsistent for {f.label}: "
            f"quadrature {q.value:.6f} vs monte carlo {mc:.6f} (bar {error_bar:.2e})"
        )
    return ReferenceIntegral(q.value, error_bar, "quadrature", mc, se)


def reference_family(
    family: Iterable[TestFunction], cfg: MeasureConfig, n_samples: int = DEFAULT_MC_SAMPLES
) -> list[ReferenceIntegral]:
    samples = mu_sample_arrays(cfg, n_samples)
    return [reference(f, cfg, samples=samples) for f in family]
