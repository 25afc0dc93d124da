"""Chart domains, quadrature, and the metric Gram-Schmidt frame."""

import numpy as np
import pytest

from confgeo.chart import ChartDomain, frame_gram_schmidt, integrate_chart
from confgeo.curvature import MetricField, grad_laplace, volume_density_field
from confgeo.errors import NonPeriodicDomainWarning, NotSPDError
from confgeo.fields import ScalarField


def test_chart_invariants_enforced():
    with pytest.raises(ValueError):
        ChartDomain(lo=(0.0,), hi=(1.0,))  # dimension below 2
    with pytest.raises(ValueError):
        ChartDomain(lo=(0.0, 1.0), hi=(1.0, 0.5))  # lo >= hi
    with pytest.raises(ValueError):
        ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), grid_res=(3, 8))


def test_wrap_periodic():
    chart = ChartDomain(lo=(0.0, -1.0), hi=(1.0, 1.0), periodic=(True, False))
    wrapped = chart.wrap(np.array([1.75, 0.5]))
    assert wrapped[0] == pytest.approx(0.75)
    assert wrapped[1] == pytest.approx(0.5)


def test_unit_torus_volume():
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), periodic=(True, True),
                        grid_res=(16, 16))
    one = ScalarField.constant(chart, 1.0)
    assert integrate_chart(one, chart) == pytest.approx(1.0, abs=1e-14)


def test_sine_integrates_to_zero():
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), periodic=(True, True),
                        grid_res=(32, 32))
    f = ScalarField.from_expression(chart, "sin(2*pi*x)")
    assert abs(integrate_chart(f, chart)) < 1e-12


def test_laplacian_integral_vanishes_on_torus():
    # divergence-theorem oracle: integral of lap(phi) over a closed chart
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), periodic=(True, True),
                        grid_res=(32, 32))
    g = MetricField.flat(chart)
    phi = ScalarField.from_expression(chart, "sin(2*pi*x)")

    def integrand(coords):
        pts = np.stack(coords, axis=-1)
        return grad_laplace(g, phi, pts).laplace

    total = integrate_chart(integrand, chart, density=volume_density_field(g))
    assert abs(total) < 1e-10


def test_exact_derivative_integrates_to_zero():
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), periodic=(True, True),
                        grid_res=(32, 32))
    f = ScalarField.from_expression(chart, "cos(2*pi*x)*sin(2*pi*y)")

    def ddx(coords):
        pts = np.stack(coords, axis=-1)
        return f.jet(pts, order=1).d1[..., 0]

    assert abs(integrate_chart(ddx, chart)) < 1e-10


def test_non_periodic_quadrature_warns_but_returns():
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), grid_res=(40, 40))
    f = ScalarField.from_expression(chart, "x*y")
    with pytest.warns(NonPeriodicDomainWarning):
        val = integrate_chart(f, chart)
    assert val == pytest.approx(0.25, abs=1e-12)


def test_frame_identity_metric_is_coordinate_basis():
    e = frame_gram_schmidt(np.eye(3))
    assert np.array_equal(e, np.eye(3))


def test_frame_diagonal_metric():
    e = frame_gram_schmidt(np.diag([4.0, 9.0]))
    assert np.allclose(e, np.diag([0.5, 1.0 / 3.0]))


def test_frame_random_spd_gram_identity(rng):
    # direct Gram-matrix oracle
    for n in (2, 3, 4, 5):
        a = rng.normal(size=(8, n, n))
        g = np.eye(n) + a @ np.swapaxes(a, -1, -2)
        e = frame_gram_schmidt(g)
        gram = np.einsum("...ia,...ij,...jb->...ab", e, g, e)
        assert np.max(np.abs(gram - np.eye(n))) < 1e-12


def test_frame_orientation_preserved(rng):
    a = rng.normal(size=(3, 3))
    g = np.eye(3) + a @ a.T
    e = frame_gram_schmidt(g)
    assert np.linalg.det(e) > 0


def test_frame_rejects_non_spd():
    with pytest.raises(NotSPDError):
        frame_gram_schmidt(np.diag([1.0, -1.0]))
