import numpy as np
import pytest

from confgeo.chart import ChartDomain
from confgeo.curvature import MetricField
from confgeo.fields import ScalarField


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def unit2():
    return ChartDomain(lo=(-1.0, -1.0), hi=(1.0, 1.0))


@pytest.fixture
def unit3():
    return ChartDomain(lo=(-1.0, -1.0, -1.0), hi=(1.0, 1.0, 1.0))


@pytest.fixture
def torus2():
    return ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), periodic=(True, True),
                       grid_res=(32, 32))


@pytest.fixture
def flat2(unit2):
    return MetricField.flat(unit2)


@pytest.fixture
def flat3(unit3):
    return MetricField.flat(unit3)


@pytest.fixture
def sphere():
    chart = ChartDomain(lo=(0.45, 0.0), hi=(2.65, 2.0 * np.pi),
                        periodic=(False, True), names=("theta", "phi"))
    return MetricField.diagonal(chart, ["1", "sin(theta)^2"], name="sphere")


@pytest.fixture
def gentle_phi3(unit3):
    return ScalarField.from_expression(unit3, "0.2*sin(x)*cos(y) + 0.1*z*z")
