"""Connection and curvature: golden values, symmetries, conventions."""

import numpy as np
import pytest

from confgeo.chart import ChartDomain
from confgeo.curvature import (
    MetricField,
    christoffel,
    curvature_pack,
    grad_laplace,
    lie_derivative_metric,
    volume_density,
)
from confgeo.errors import NotSPDError
from confgeo.fields import ScalarField, VectorField
from confgeo.holonomy import metric_preservation_defect, path_transport_matrix, polyline_path
from confgeo.library import random_metric, random_scalar_field, unit_chart


def test_flat_christoffel_zero(flat3):
    gam = christoffel(flat3, np.array([0.2, -0.1, 0.4])).gamma
    assert np.max(np.abs(gam)) == 0.0


def test_conformally_flat_christoffel_closed_form(unit3):
    # law specialization: Gamma~^k_ij = di phi d_jk + dj phi d_ik - dk phi d_ij
    phi = ScalarField.from_expression(unit3, "0.2*sin(x) + 0.1*y*z")
    rows = [[f"exp(2*(0.2*sin(x) + 0.1*y*z))" if i == j else "0" for j in range(3)]
            for i in range(3)]
    g = MetricField.from_expressions(unit3, rows)
    x = np.array([0.3, -0.2, 0.5])
    gam = christoffel(g, x).gamma
    dphi = phi.jet(x, order=1).d1
    eye = np.eye(3)
    expected = (np.einsum("i,kj->kij", dphi, eye)
                + np.einsum("j,ki->kij", dphi, eye)
                - np.einsum("ij,k->kij", eye, dphi))
    assert np.max(np.abs(gam - expected)) < 1e-12


def test_sphere_christoffel_against_fd_oracle(sphere):
    # order-2 FD oracle applied to the closed-form metric entries
    x = np.array([1.1, 0.7])
    gam = christoffel(sphere, x).gamma
    h = 1e-5

    def g_at(theta):
        return np.array([[1.0, 0.0], [0.0, np.sin(theta) ** 2]])

    dg_dtheta = (g_at(x[0] + h) - g_at(x[0] - h)) / (2 * h)
    g_inv = np.linalg.inv(g_at(x[0]))
    # Gamma^k_{ij} with only d_theta g_phiphi nonzero
    expected_theta_phiphi = -0.5 * g_inv[0, 0] * dg_dtheta[1, 1]
    assert gam[0, 1, 1] == pytest.approx(expected_theta_phiphi, abs=1e-8)
    assert gam[0, 1, 1] == pytest.approx(-np.sin(1.1) * np.cos(1.1), abs=1e-8)
    assert gam[1, 0, 1] == pytest.approx(np.cos(1.1) / np.sin(1.1), abs=1e-8)


def test_sphere_curvature_golden(sphere):
    pts = np.stack([np.linspace(0.6, 2.4, 5), np.linspace(0.5, 5.5, 5)], axis=-1)
    cb = curvature_pack(sphere, pts)
    assert np.max(np.abs(cb.scal - 2.0)) < 1e-6
    assert np.max(np.abs(cb.ricci - cb.g)) < 1e-6


def test_flat_curvature_zero(flat2):
    cb = curvature_pack(flat2, np.array([[0.1, 0.2], [-0.3, 0.4]]))
    assert np.max(np.abs(cb.riemann)) == 0.0


def test_riemann_symmetries_random(rng):
    chart = unit_chart(3)
    g = random_metric(chart, rng)
    pts = chart.interior_sample(rng, 6)
    cb = curvature_pack(g, pts)
    r = cb.riemann
    assert np.max(np.abs(r + np.einsum("...ijkl->...jikl", r))) < 1e-8
    assert np.max(np.abs(r + np.einsum("...ijkl->...ijlk", r))) < 1e-8
    assert np.max(np.abs(r - np.einsum("...ijkl->...klij", r))) < 1e-8
    bianchi = (r + np.einsum("...ijkl->...iklj", r)
               + np.einsum("...ijkl->...iljk", r))
    assert np.max(np.abs(bianchi)) < 1e-8
    trace = np.einsum("...ij,...ij->...", cb.g_inv, cb.ric0)
    assert np.max(np.abs(trace)) < 1e-10


def test_dimension_two_trace_free_ricci_vanishes(rng):
    chart = unit_chart(2)
    g = random_metric(chart, rng)
    pts = chart.interior_sample(rng, 8)
    cb = curvature_pack(g, pts)
    assert np.max(np.abs(cb.ric0)) < 1e-8


def test_product_metric_mixed_riemann_zero(rng):
    chart = ChartDomain(lo=(-1.0,) * 4, hi=(1.0,) * 4, names=("x", "y", "z", "w"))
    rows = [
        ["1 + 0.2*sin(x+y)", "0.1*x*y", "0", "0"],
        ["0.1*x*y", "1 + 0.2*cos(y)", "0", "0"],
        ["0", "0", "1 + 0.2*sin(z)", "0.1*z*w"],
        ["0", "0", "0.1*z*w", "1 + 0.1*w^2"],
    ]
    g = MetricField.from_expressions(chart, rows)
    pts = chart.interior_sample(rng, 4)
    cb = curvature_pack(g, pts)
    mixed = cb.riemann[..., :2, 2:, :, :]
    assert np.max(np.abs(mixed)) < 1e-8


def test_laplacian_sign_convention(flat2):
    # lap = -tr(nabla d .): phi = x^2 gives -2
    phi = ScalarField.from_expression(flat2.chart, "x^2")
    gl = grad_laplace(flat2, phi, np.array([0.3, 0.0]))
    assert gl.laplace == pytest.approx(-2.0)
    assert gl.grad == pytest.approx([0.6, 0.0])
    assert gl.dphi_norm2 == pytest.approx(0.36)


def test_covariant_hessian_symmetric(rng):
    # torsion-free connection: mixed second covariant derivatives agree
    chart = unit_chart(3)
    g = random_metric(chart, rng)
    phi = random_scalar_field(chart, rng)
    pts = chart.interior_sample(rng, 5)
    hess = grad_laplace(g, phi, pts).hessian
    assert np.max(np.abs(hess - np.swapaxes(hess, -1, -2))) < 1e-12


def test_metric_compatibility_via_transport(rng):
    # transport preserves inner products along open curves: nabla g = 0
    chart = unit_chart(3)
    g = random_metric(chart, rng)
    a = np.array([0.0, 0.1, -0.2])
    b = np.array([0.3, -0.2, 0.2])
    path = polyline_path([a, b])
    p = path_transport_matrix(g, path, steps=80)
    assert metric_preservation_defect(g, path, p) < 1e-8


def test_volume_density_golden(flat3, unit2):
    assert volume_density(flat3, np.zeros(3)) == pytest.approx(1.0)
    g49 = MetricField.diagonal(unit2, ["4", "9"])
    assert volume_density(g49, np.zeros(2)) == pytest.approx(6.0)


def test_not_spd_raises(unit2):
    g = MetricField.diagonal(unit2, ["1", "-1"])
    with pytest.raises(NotSPDError):
        christoffel(g, np.zeros(2))


def test_lie_derivative_euler_field(flat2):
    xi = VectorField.from_expressions(flat2.chart, ["x", "y"])
    lie = lie_derivative_metric(flat2, xi, np.array([0.2, -0.4]))
    assert np.allclose(lie, 2.0 * np.eye(2), atol=1e-14)
