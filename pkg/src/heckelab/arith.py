"""Exact 2x2 integer matrix arithmetic and normal forms.

All entries are Python ints, so nothing here can overflow.  The Smith form
uses the content/determinant shortcut, which is only valid for 2x2 matrices.
"""

from __future__ import annotations

from math import gcd
from typing import NamedTuple


class SingularMatrixError(ValueError):
    pass


class IntMat2(NamedTuple):
    """Row-major integer matrix [[a, b], [c, d]]."""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def parse(cls, text: str) -> "IntMat2":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected 'a,b,c,d', got {text!r}")
        return cls(*(int(p) for p in parts))

    def format(self) -> str:
        return f"{self.a},{self.b},{self.c},{self.d}"

    def __matmul__(self, other: "IntMat2") -> "IntMat2":  # type: ignore[override]
        return mat_mul(self, other)

    def scale(self, k: int) -> "IntMat2":
        return IntMat2(k * self.a, k * self.b, k * self.c, k * self.d)


class DivisorType(NamedTuple):
    d1: int
    d2: int


IDENTITY = IntMat2(1, 0, 0, 1)
S = IntMat2(0, -1, 1, 0)
T = IntMat2(1, 1, 0, 1)
T_INV = IntMat2(1, -1, 0, 1)


def det(m: IntMat2) -> int:
    return m.a * m.d - m.b * m.c


def content(m: IntMat2) -> int:
    g = gcd(gcd(m.a, m.b), gcd(m.c, m.d))
    if g == 0:
        raise ValueError("content of the zero matrix is undefined")
    return g


def mat_mul(m1: IntMat2, m2: IntMat2) -> IntMat2:
    return IntMat2(
        m1.a * m2.a + m1.b * m2.c,
        m1.a * m2.b + m1.b * m2.d,
        m1.c * m2.a + m1.d * m2.c,
        m1.c * m2.b + m1.d * m2.d,
    )


def adjugate(m: IntMat2) -> IntMat2:
    return IntMat2(m.d, -m.b, -m.c, m.a)


def _xgcd(x: int, y: int) -> tuple[int, int, int]:
    """Return (g, u, v) with u*x + v*y = g = gcd(x, y) >= 0."""
    u0, v0, u1, v1 = 1, 0, 0, 1
    while y:
        q, r = divmod(x, y)
        x, y = y, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if x < 0:
        x, u0, v0 = -x, -u0, -v0
    return x, u0, v0


def hnf(m: IntMat2) -> IntMat2:
    """Hermite normal form [[r, s], [0, t]] of the left SL(2,Z)-coset of m.

    r, t > 0 and 0 <= s < t.  Requires det(m) > 0.
    """
    n = det(m)
    if n == 0:
        raise SingularMatrixError("singular matrix")
    if n < 0:
        raise ValueError("hnf requires a positive determinant")
    # Row operation [[u, v], [-c/g, a/g]] sends the first column to (g, 0).
    g, u, v = _xgcd(m.a, m.c)
    b = u * m.b + v * m.d
    t = (m.a * m.d - m.c * m.b) // g
    # t > 0 because g > 0 and the row operation has determinant 1.
    return IntMat2(g, b % t, 0, t)


def snf(m: IntMat2) -> DivisorType:
    n = det(m)
    if n == 0:
        raise SingularMatrixError("singular matrix")
    d1 = content(m)
    return DivisorType(d1, abs(n) // d1)


def is_unimodular_quotient(m1: IntMat2, m2: IntMat2) -> bool:
    """True iff m1 = gamma @ m2 for some gamma in SL(2,Z)."""
    n = det(m2)
    if det(m1) != n:
        raise ValueError("determinant mismatch")
    if n <= 0:
        raise ValueError("determinants must be positive")
    q = mat_mul(m1, adjugate(m2))
    if any(e % n for e in q):
        return False
    gamma = IntMat2(*(e // n for e in q))
    return det(gamma) == 1
