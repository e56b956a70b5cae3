import sys

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SEATING_GRID = np.array([[1, 1, 0, 1, 1],
                         [1, 1, 0, 1, 1],
                         [0, 0, 1, 0, 0],
                         [1, 1, 0, 1, 1],
                         [1, 1, 0, 1, 1]])


def int_bits(value: int, bits: int) -> list[int]:
    return [(value >> k) & 1 for k in range(bits)]


def pythagoras_bits(x: int, y: int, z: int) -> np.ndarray:
    return np.array(int_bits(x, 4) + int_bits(y, 4) + int_bits(z, 4), dtype=np.uint8)


def tsp_bits(xb: int, xc: int, xd: int) -> np.ndarray:
    # q[r, 0] is the 2s bit, q[r, 1] the 1s bit
    return np.array([b for v in (xb, xc, xd) for b in ((v >> 1) & 1, v & 1)], dtype=np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
