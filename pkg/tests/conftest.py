import numpy as np
import pytest

from lagtorus.torus import FrameAtNorthPole


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def frame():
    return FrameAtNorthPole()


@pytest.fixture
def tilted_frame():
    # a generic orthonormal frame, to catch code that silently assumes N = e_z
    a = np.random.default_rng(7).standard_normal((3, 3))
    q, _ = np.linalg.qr(a)
    return FrameAtNorthPole(N=q[:, 0], fiber=q[:, 1:].T)


ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
