import numpy as np
import pytest

from slitcyl import AIR, ElasticShell, RigidCore, Scatterer, SlitCylinder
from slitcyl.effective import latex_paper_material

RO = 0.0275
H = 0.002
D = 0.004
RECEIVER = (1.5775, 0.0)
CENTRE = (1.5, 0.0)


@pytest.fixture(scope="session")
def ring1():
    return SlitCylinder.periodic(RO, H, 1, D)


@pytest.fixture(scope="session")
def ring4():
    return SlitCylinder.periodic(RO, H, 4, D)


@pytest.fixture(scope="session")
def latex_shell():
    return ElasticShell(0.02, 0.00025, latex_paper_material(AIR))


@pytest.fixture(scope="session")
def scatterers(ring1, ring4, latex_shell):
    return {
        "1S": Scatterer(CENTRE, ring1),
        "4S": Scatterer(CENTRE, ring4),
        "4S+core": Scatterer(CENTRE, ring4, RigidCore(0.011)),
        "4S+latex": Scatterer(CENTRE, ring4, latex_shell),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
