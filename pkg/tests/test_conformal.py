"""Conformal rescaling identities and the Einstein-pair diagnostics."""

import numpy as np
import pytest

from confgeo.conformal import (
    conformal_vector_residual,
    connection_law_residual,
    einstein_pair_diagnostics,
    mobius_einstein_pair,
    rescale,
    scalar_law_residual,
    trace_free_ricci_residual,
)
from confgeo.curvature import MetricField, curvature_pack
from confgeo.errors import DomainMismatchError, NotParallelError
from confgeo.fields import ScalarField, VectorField
from confgeo.library import (
    parallel_certificate_config,
    random_conformal_pair,
    random_metric,
    random_scalar_field,
    unit_chart,
)


def test_rescale_identity_and_homothety(flat2):
    chart = flat2.chart
    zero = ScalarField.from_expression(chart, "0*x")
    pair = rescale(flat2, zero)
    x = np.array([0.3, -0.5])
    assert np.allclose(pair.g_tilde.values(x), flat2.values(x))

    ln2 = ScalarField.from_expression(chart, "0*x + 0.6931471805599453")
    pair4 = rescale(flat2, ln2)
    assert np.allclose(pair4.g_tilde.values(x), 4.0 * flat2.values(x))


def test_rescale_rejects_chart_mismatch(flat2, unit3):
    phi = ScalarField.from_expression(unit3, "x")
    with pytest.raises(DomainMismatchError):
        rescale(flat2, phi)


def test_mobius_family_metric_form(unit3):
    # e^{-phi} = |x|^2 + c  =>  g~ = delta / (|x|^2 + c)^2
    pair = mobius_einstein_pair(unit3, c=1.0)
    x = np.array([0.3, -0.2, 0.5])
    denom = (np.sum(x * x) + 1.0) ** 2
    assert np.allclose(pair.g_tilde.values(x), np.eye(3) / denom, rtol=1e-12)


def test_componentwise_exactness(rng):
    chart = unit_chart(3)
    pair = random_conformal_pair(chart, rng)
    pts = chart.interior_sample(rng, 6)
    expected = np.exp(2.0 * pair.phi(pts))[:, None, None] * pair.g.values(pts)
    assert np.array_equal(pair.g_tilde.values(pts), expected)


def test_involution_machine_precision(rng):
    chart = unit_chart(3)
    g = random_metric(chart, rng)
    phi = random_scalar_field(chart, rng)
    pair = rescale(g, phi)
    neg = ScalarField(chart, lambda c: -phi.fn(c))
    back = rescale(pair.g_tilde, neg)
    pts = chart.interior_sample(rng, 6)
    gap = np.max(np.abs(back.g_tilde.values(pts) - g.values(pts)))
    assert gap < 1e-14


def test_connection_law_cases(flat3, rng):
    chart = flat3.chart
    x = chart.interior_sample(rng, 3)
    const = rescale(flat3, ScalarField.from_expression(chart, "0*x + 0.25"))
    assert connection_law_residual(const, x) < 1e-12
    wavy = rescale(flat3, ScalarField.from_expression(chart, "0.1*sin(x)"))
    assert connection_law_residual(wavy, x) < 1e-8
    pair = random_conformal_pair(chart, rng)
    assert connection_law_residual(pair, x) < 1e-7


def test_trace_free_ricci_cases(rng):
    chart3 = unit_chart(3)
    flat = MetricField.flat(chart3)
    pts = chart3.interior_sample(rng, 3)
    const = rescale(flat, ScalarField.from_expression(chart3, "0*x + 1.1"))
    assert trace_free_ricci_residual(const, pts) < 1e-10
    phi = ScalarField.from_expression(chart3, "0.2*sin(x)*cos(y)")
    assert trace_free_ricci_residual(rescale(flat, phi), pts) < 1e-6

    chart2 = unit_chart(2)
    pair2 = random_conformal_pair(chart2, rng)
    pts2 = chart2.interior_sample(rng, 4)
    assert trace_free_ricci_residual(pair2, pts2) < 1e-8  # (n-2) factors kill it


def test_scalar_law_n2_certificate(rng):
    chart = unit_chart(2)
    flat = MetricField.flat(chart)
    phi = ScalarField.from_expression(chart, "0.3*sin(x)")
    pair = rescale(flat, phi)
    xi0 = VectorField.from_expressions(chart, ["0", "1"])
    pts = chart.interior_sample(rng, 3)
    res = scalar_law_residual(pair, pts, xi0=xi0)
    assert res.r1 < 1e-8
    assert res.r2 < 1e-6
    assert res.hypothesis_defect < 1e-10


def test_scalar_law_hyperbolic_certificate(rng):
    # flat slab, phi = -log(z): the rescaled metric has constant curvature
    pair, xi = parallel_certificate_config()
    pts = pair.chart.interior_sample(rng, 4)
    res = scalar_law_residual(pair, pts, xi0=xi)
    assert res.r1 < 1e-8
    assert res.r2 < 1e-6
    assert res.parallel_identity < 1e-6
    cb_t = curvature_pack(pair.g_tilde, pts)
    assert np.max(np.abs(cb_t.scal + 6.0)) < 1e-8  # hyperbolic 3-space


def test_not_parallel_fires_on_perturbed_field():
    pair, _ = parallel_certificate_config()
    chart = pair.chart
    bad = VectorField.from_expressions(chart, ["1", "0.01*sin(3*x)", "0"])
    with pytest.raises(NotParallelError):
        scalar_law_residual(pair, np.array([0.1, 0.0, 1.0]), xi0=bad)


def test_einstein_pair_mobius_and_generic(unit3, rng):
    pair = mobius_einstein_pair(unit3, c=1.0)
    pts = unit3.interior_sample(rng, 4)
    d = einstein_pair_diagnostics(pair, pts)
    assert d.ric0_g < 1e-10
    assert d.ric0_g_tilde < 1e-5
    assert d.ng_residual < 1e-5

    generic = rescale(MetricField.flat(unit3),
                      ScalarField.from_expression(unit3, "sin(x)"))
    d2 = einstein_pair_diagnostics(generic, pts)
    assert d2.ric0_g_tilde > 0.01  # not Einstein, reported without pass/fail


def test_einstein_implication_on_einstein_pairs(unit3, rng):
    # when both metrics are Einstein the displayed identity must hold
    pair = mobius_einstein_pair(unit3, c=1.5)
    pts = unit3.interior_sample(rng, 5)
    d = einstein_pair_diagnostics(pair, pts)
    if d.ric0_g < 1e-7 and d.ric0_g_tilde < 1e-7:
        assert d.ng_residual < 1e-5


def test_conformal_vector_residuals(flat2, rng):
    chart = flat2.chart
    pts = chart.interior_sample(rng, 4)
    translation = VectorField.from_expressions(chart, ["1", "0"])
    res = conformal_vector_residual(flat2, translation, pts)
    assert res.conformal == pytest.approx(0.0, abs=1e-14)
    assert res.killing == pytest.approx(0.0, abs=1e-14)

    euler = VectorField.from_expressions(chart, ["x", "y"])
    res2 = conformal_vector_residual(flat2, euler, pts)
    assert res2.conformal < 1e-10
    assert res2.killing == pytest.approx(2.0, abs=1e-12)


def test_mobius_vector_conformal_not_killing(unit3, rng):
    pair = mobius_einstein_pair(unit3, c=1.0)
    xi = VectorField.from_expressions(unit3, ["-2*x", "-2*y", "-2*z"])
    pts = unit3.interior_sample(rng, 4)
    res = conformal_vector_residual(pair.g, xi, pts)
    assert res.conformal < 1e-6
    assert res.killing > 1e-2


def test_conformal_residual_invariance(rng):
    chart = unit_chart(3)
    g = random_metric(chart, rng)
    phi = random_scalar_field(chart, rng)
    xi = VectorField.from_expressions(chart, ["y", "-x + 0.2*z", "x*y"])
    pts = chart.interior_sample(rng, 4)
    a = conformal_vector_residual(g, xi, pts).conformal
    b = conformal_vector_residual(rescale(g, phi).g_tilde, xi, pts).conformal
    assert abs(a - b) < 1e-10


def test_randomized_identity_suite(rng):
    # residuals stay below 1e-6 across dims on the dual backend
    for dim in (2, 3, 4):
        chart = unit_chart(dim)
        for _ in range(4):
            pair = random_conformal_pair(chart, rng)
            pts = chart.interior_sample(rng, 2)
            assert connection_law_residual(pair, pts) < 1e-6
            assert trace_free_ricci_residual(pair, pts) < 1e-6
            assert scalar_law_residual(pair, pts).r1 < 1e-6
