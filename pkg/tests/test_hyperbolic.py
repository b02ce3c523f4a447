import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckelab.arith import IDENTITY, S, T, T_INV, IntMat2, mat_mul
from heckelab.hyperbolic import (
    EPS_RED,
    MeasureConfig,
    ReductionError,
    UHPoint,
    hyp_dist,
    in_fundamental_domain,
    mobius,
    mobius_many,
    mu_quadrature,
    mu_sample,
    mu_sample_arrays,
    reduce,
    reduce_many,
)

from conftest import sl2z

points = st.builds(
    UHPoint,
    st.floats(-50, 50, allow_nan=False),
    st.floats(-3, 3).map(lambda e: 10.0**e),
)


def test_mobius_examples():
    z = UHPoint(0.3, 1.7)
    assert mobius(IDENTITY, z) == z
    assert mobius(S, UHPoint(0, 1)) == UHPoint(0, 1)
    assert mobius(T, UHPoint(0, 1)) == UHPoint(1, 1)


@given(points, st.integers(1, 1000))
def test_mobius_scalar_invariance(z, k):
    m = IntMat2(2, 1, 3, 5)
    w1, w2 = mobius(m, z), mobius(m.scale(k), z)
    assert w1.x == pytest.approx(w2.x, rel=1e-12, abs=1e-12)
    assert w1.y == pytest.approx(w2.y, rel=1e-12)


def test_mobius_rejects_nonpositive_det():
    with pytest.raises(ValueError):
        mobius(IntMat2(0, 1, 1, 0), UHPoint(0, 1))


def test_uhpoint_validation():
    with pytest.raises(ValueError):
        UHPoint(0.0, 0.0)
    assert UHPoint.parse("0.3,1.2") == UHPoint(0.3, 1.2)


def test_reduce_examples():
    pt, g = reduce(UHPoint(5, 1))
    assert (pt.x, pt.y) == (0.0, 1.0) and g == IntMat2(1, -5, 0, 1)
    pt, g = reduce(UHPoint(0, 0.5))
    assert (pt.x, pt.y) == (0.0, 2.0) and g == S
    # 0.4 + 0.2i is in the orbit of i: -z/(2z - 1) = i.
    pt, g = reduce(UHPoint(0.4, 0.2))
    assert pt.y >= math.sqrt(3) / 2
    assert (pt.x, pt.y) == pytest.approx((0.0, 1.0), abs=1e-15)
    assert g == IntMat2(-1, 0, 2, -1)


def test_reduce_tie_rules():
    pt, _ = reduce(UHPoint(0.5, 2.0))
    assert pt.x == -0.5
    pt, _ = reduce(UHPoint(0.5 - 1e-13, 2.0))
    assert pt.x == pytest.approx(-0.5, abs=1e-12)
    c, s_ = math.cos(1.2), math.sin(1.2)
    pt, _ = reduce(UHPoint(c, s_))
    assert pt.x == pytest.approx(-c, abs=1e-12) and pt.y == pytest.approx(s_, abs=1e-12)
    rho = UHPoint(0.5, math.sqrt(3) / 2)
    pt, _ = reduce(rho)
    assert pt.x == pytest.approx(-0.5, abs=1e-12)


def test_reduce_underflow():
    with pytest.raises(ReductionError):
        reduce(UHPoint(0.1, 1e-320))


def test_reduce_cap(monkeypatch):
    from heckelab import hyperbolic

    monkeypatch.setattr(hyperbolic, "MAX_REDUCE_ITER", 2)
    with pytest.raises(ReductionError, match="cap"):
        reduce(UHPoint(0.37, 1e-6))
    with pytest.raises(ReductionError, match="cap"):
        reduce_many([0.37], [1e-6])


def _brute_reduce(z: UHPoint, depth: int = 9):
    """Search words in S, T, T^-1 for one mapping z into the closed domain."""
    frontier, seen = [IDENTITY], {IDENTITY}
    for _ in range(depth):
        nxt = []
        for g in frontier:
            w = mobius(g, z)
            if abs(w.x) <= 0.5 + 1e-9 and w.x * w.x + w.y * w.y >= 1 - 1e-9:
                return w
            for h in (S, T, T_INV):
                gh = mat_mul(h, g)
                if gh not in seen:
                    seen.add(gh)
                    nxt.append(gh)
        frontier = nxt
    return None


@pytest.mark.parametrize(
    "z", [UHPoint(0.4, 0.2), UHPoint(0.31, 0.27), UHPoint(-2.2, 0.4), UHPoint(0.13, 0.61),
          UHPoint(1.7, 0.9)],
)
def test_reduce_matches_word_search(z):
    w = _brute_reduce(z)
    assert w is not None
    pt, _ = reduce(z)
    assert (pt.x, pt.y) == pytest.approx((w.x, w.y), abs=1e-9) or (
        abs(abs(w.x) - 0.5) < 1e-9 and pt.x == pytest.approx(-0.5) and pt.y == pytest.approx(w.y))


@given(points)
def test_reduce_lands_in_domain_and_idempotent(z):
    pt, _ = reduce(z)
    assert abs(pt.x) <= 0.5 + EPS_RED
    assert pt.x * pt.x + pt.y * pt.y >= 1 - EPS_RED
    again, g = reduce(pt.point)
    assert abs(again.x - pt.x) <= 1e-12 and abs(again.y - pt.y) <= 1e-12


@given(points)
def test_witness(z):
    pt, g = reduce(z)
    w = mobius(g, z)
    assert abs(w.x - pt.x) <= 1e-12 and abs(w.y - pt.y) <= 1e-12


strip_points = st.builds(
    UHPoint,
    st.floats(-0.5, 0.5, allow_nan=False),
    st.floats(-3, 3).map(lambda e: 10.0**e),
)


def hyperbolic_gap(p1, p2) -> float:
    """|p1 - p2| / Im p1: hyperbolic displacement to first order, robust at tiny gaps."""
    return math.hypot(p1.x - p2.x, p1.y - p2.y) / p1.y


@settings(max_examples=300)
@given(strip_points, sl2z)
def test_gamma_invariance(z, g):
    p1, _ = reduce(z)
    p2, _ = reduce(mobius(g, z))
    # Off-boundary points only; boundary pairs are identified by the tie rules.
    if abs(abs(p1.x) - 0.5) > 1e-8 and abs(p1.x**2 + p1.y**2 - 1) > 1e-8:
        assert hyperbolic_gap(p1, p2) <= 1e-9


def test_reduce_many_matches_scalar(rng):
    xs = rng.uniform(-30, 30, 2000)
    ys = 10.0 ** rng.uniform(-4, 3, 2000)
    vx, vy = reduce_many(xs, ys)
    for x, y, a, b in zip(xs, ys, vx, vy):
        pt, _ = reduce(UHPoint(x, y))
        assert (pt.x, pt.y) == (a, b)


def test_mobius_many_matches_scalar(rng):
    ms = [IntMat2(1, s, 0, 7) for s in range(7)] + [IntMat2(2, 1, 3, 5), IntMat2(7, 0, 0, 1)]
    arr = np.array(ms, dtype=float)
    xs, ys = mobius_many(*arr.T, 0.3, 1.1)
    for m, x, y in zip(ms, xs, ys):
        w = mobius(m, UHPoint(0.3, 1.1))
        assert (w.x, w.y) == pytest.approx((x, y), rel=1e-15)


def test_hyp_dist_examples():
    i = UHPoint(0, 1)
    assert hyp_dist(i, i) == 0
    assert hyp_dist(i, UHPoint(0, math.e)) == pytest.approx(1.0, rel=1e-12)
    assert hyp_dist(i, UHPoint(1, 1)) == pytest.approx(math.acosh(1.5), rel=1e-12)
    assert math.acosh(1.5) == pytest.approx(0.9624, abs=1e-4)


@given(points, points, points)
def test_hyp_dist_metric(a, b, c):
    assert hyp_dist(a, b) == pytest.approx(hyp_dist(b, a), rel=1e-9, abs=1e-9)
    assert hyp_dist(a, c) <= hyp_dist(a, b) + hyp_dist(b, c) + 1e-7


@given(points, sl2z)
def test_hyp_dist_isometry(z, g):
    w = UHPoint(0.2, 1.3)
    d0 = hyp_dist(z, w)
    d1 = hyp_dist(mobius(g, z), mobius(g, w))
    assert d1 == pytest.approx(d0, rel=1e-6, abs=1e-6)


# --- measure ---------------------------------------------------------------

def test_fundamental_domain_mass():
    # Closed form: integral of dx / sqrt(1 - x^2) over [-1/2, 1/2] = 2 asin(1/2).
    closed = 2 * math.asin(0.5)
    q = mu_quadrature(lambda x, y: 1.0, MeasureConfig(normalization=1.0, y_max=math.inf))
    assert q.value == pytest.approx(closed, abs=1e-12)
    assert q.value == pytest.approx(math.pi / 3, abs=1e-4)


def test_normalization_constant():
    cfg = MeasureConfig()
    mass = mu_quadrature(lambda x, y: 1.0, MeasureConfig(normalization=1.0, y_max=math.inf)).value
    assert abs(cfg.normalization - 1.0 / mass) <= 1e-6


def test_quadrature_constant_truncated():
    cfg = MeasureConfig()
    q = mu_quadrature(lambda x, y: 1.0, cfg)
    assert q.tail_bound == pytest.approx(3 / math.pi / 1e3)
    assert abs(q.value - 1.0) <= q.tail_bound + 1e-9


def test_quadrature_sharp_height():
    q = mu_quadrature(lambda x, y: float(y > 2), MeasureConfig(y_max=math.inf), y_breaks=(2.0,))
    assert q.value == pytest.approx(3 / (2 * math.pi), abs=1e-6)


def test_mu_sample_basic():
    cfg = MeasureConfig(seed=3)
    pts = mu_sample(cfg, 1000)
    assert len(pts) == 1000
    xs = np.array([p.x for p in pts])
    ys = np.array([p.y for p in pts])
    assert in_fundamental_domain(xs, ys, 0.0).all()
    assert np.mean(np.ones_like(xs)) == 1.0


def test_mu_sample_deterministic():
    a = mu_sample_arrays(MeasureConfig(seed=9), 150_000)
    b = mu_sample_arrays(MeasureConfig(seed=9), 150_000)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    c = mu_sample_arrays(MeasureConfig(seed=10), 150_000)
    assert not np.array_equal(a[0], c[0])


def test_mu_sample_height_two():
    _, ys = mu_sample_arrays(MeasureConfig(seed=0), 10**6)
    assert np.mean(ys > 2) == pytest.approx(3 / (2 * math.pi), abs=0.002)


def test_mu_sample_height_sqrt3_vs_quadrature():
    _, ys = mu_sample_arrays(MeasureConfig(seed=1), 10**6)
    p_hat = np.mean(ys > math.sqrt(3))
    se = math.sqrt(p_hat * (1 - p_hat) / ys.size)
    q = mu_quadrature(lambda x, y: float(y > math.sqrt(3)), MeasureConfig(y_max=math.inf),
                      y_breaks=(math.sqrt(3),))
    assert abs(p_hat - q.value) <= 3 * se
