import numpy as np
import pytest

from kron3d.channel import ArrayGeometry, ChannelParams

PI = np.pi

ACCEPTANCE_LINES = []


@pytest.fixture
def geom4():
    return ArrayGeometry(4, 4, 0.5, 0.5)


@pytest.fixture
def geom2():
    return ArrayGeometry(2, 2, 0.5, 0.5)


@pytest.fixture
def defaults():
    """Beam-loss default setting: phi=pi/3, theta=3pi/8, sigma=pi/6, xi=pi/12."""
    return ChannelParams(PI / 3, 3 * PI / 8, PI / 6, PI / 12, 20)


@pytest.fixture
def moderate():
    return ChannelParams(PI / 3, 3 * PI / 8, PI / 12, PI / 36, 20)


def random_hermitian(rng, n):
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return x + x.conj().T


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
