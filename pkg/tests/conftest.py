import numpy as np
import pytest

from gnfi import GratingConfig, PeriodicGrid

PI = np.pi
LAM = 2.0  # wavelength for kappa_plus = pi


def make_cfg(n=64, h=0.1, delta=0.0125, kp=PI, km=1.6 * PI, pol=(1.0, 0.0), period=(1.0, 1.0)):
    """Config with ``h`` and ``delta`` given in wavelengths."""
    lam = 2 * np.pi / kp
    return GratingConfig(kp, km, delta * lam, h * lam, -h * lam,
                         PeriodicGrid(period[0], period[1], n, n), pol)


@pytest.fixture
def cfg():
    return make_cfg()


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
