import math

import pytest

from sbs_transduction import fibermode
from sbs_transduction.materials import get_material

LAMBDA = 1534e-9


@pytest.fixture(scope="session")
def lanthano():
    return get_material("lanthano-aluminosilicate")


@pytest.fixture(scope="session")
def wire():
    return fibermode.WaveguideGeometry(0.5e-6, 1.65, 1.0, 0.08)


@pytest.fixture(scope="session")
def lp01(wire):
    return fibermode.sample_profile(wire, LAMBDA, fibermode.Grid2D(121, 2.5 * wire.core_radius))


@pytest.fixture(scope="session")
def saw_profile(wire):
    omega = 2 * math.pi * 11.476e9
    q = omega / 5727.0
    return fibermode.acoustic_profile(wire, omega, q, 0.2e-6, fibermode.Grid2D(121, 2.5 * wire.core_radius))
