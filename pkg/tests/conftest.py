import numpy as np
import pytest
from hypothesis import strategies as st

from heckelab.arith import IDENTITY, S, T, T_INV, IntMat2, det, mat_mul

GENS = (S, T, T_INV)


def word(indices) -> IntMat2:
    g = IDENTITY
    for k in indices:
        g = mat_mul(g, GENS[k])
    return g


sl2z = st.lists(st.integers(0, 2), max_size=20).map(word)

pos_det_matrices = st.tuples(*[st.integers(-60, 60)] * 4).map(lambda t: IntMat2(*t)).filter(
    lambda m: det(m) > 0
)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
