import math

import numpy as np
import pytest
from scipy import constants as sc

from ringcav import cavity, rir
from ringcav.physics import RB85

RB_MASS = 84.9118 * sc.atomic_mass


def rel(a, b):
    return abs(a / b - 1)


@pytest.fixture
def geo_p():
    return cavity.paper_geometry("p")


@pytest.fixture
def geo_s():
    return cavity.paper_geometry("s")


@pytest.fixture
def probe():
    return rir.paper_probe()


@pytest.fixture
def species():
    return RB85


@pytest.fixture
def v_th_100uk():
    # independent of the package: sqrt(kB T / m) from scipy constants
    return math.sqrt(sc.k * 100e-6 / RB_MASS)


@pytest.fixture
def q_paper():
    return 2 * (2 * math.pi / 780.241e-9) * math.sin(math.radians(13.1) / 2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS,
                           key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
