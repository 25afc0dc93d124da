"""Jet propagation: dual against finite differences, algebra, symmetry."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confgeo import jets
from confgeo.chart import ChartDomain
from confgeo.errors import OrderUnsupportedError, OutOfDomainError
from confgeo.fields import ScalarField, eval_jet


def unit_chart(n):
    return ChartDomain(lo=(-0.5,) * n, hi=(0.5,) * n)


def test_constant_field_has_zero_derivatives():
    chart = unit_chart(2)
    f = ScalarField.constant(chart, 3.25)
    j = eval_jet(f, np.zeros(2), order=2)
    assert np.all(j.d1 == 0.0)
    assert np.all(j.d2 == 0.0)


def test_polynomial_jet_exact():
    chart = ChartDomain(lo=(-2.0, -2.0), hi=(2.0, 2.0))
    f = ScalarField.from_expression(chart, "x*y")
    j = eval_jet(f, np.array([1.0, 2.0]), order=2)
    assert j.value == pytest.approx(2.0)
    assert j.d1 == pytest.approx([2.0, 1.0])
    assert j.d2[0, 1] == pytest.approx(1.0)
    assert j.d2[0, 0] == pytest.approx(0.0)


def test_dual_and_fd_agree_on_sin():
    # unit-extent chart so the FD step is 1e-2
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0))
    f = ScalarField.from_expression(chart, "sin(x) + 0*y")
    x = np.array([0.3, 0.5])
    jd = eval_jet(f, x, order=2, backend="dual")
    jf = eval_jet(f, x, order=2, backend="fd")
    assert np.max(np.abs(jd.d1 - jf.d1)) < 1e-8
    assert np.max(np.abs(jd.d2 - jf.d2)) < 1e-8


@pytest.mark.parametrize("expr", ["exp(0.5*x)*cos(y)", "log(2 + x)*sin(y + 0.2)",
                                  "sqrt(2 + x*y)", "(1 + 0.3*x)^3"])
def test_backends_agree_to_order3(expr):
    chart = unit_chart(2)
    f = ScalarField.from_expression(chart, expr)
    pts = np.array([[0.1, -0.2], [0.3, 0.4], [-0.4, 0.0]])
    jd = eval_jet(f, pts, order=3, backend="dual")
    jf = eval_jet(f, pts, order=3, backend="fd")
    assert np.max(np.abs(jd.d1 - jf.d1)) < 1e-7
    assert np.max(np.abs(jd.d2 - jf.d2)) < 1e-7
    assert np.max(np.abs(jd.d3 - jf.d3)) < 2e-6


def test_d2_symmetric_and_symmetrize_idempotent():
    chart = unit_chart(3)
    f = ScalarField.from_expression(chart, "sin(x*y) + exp(0.2*z*x)")
    j = eval_jet(f, np.array([0.2, 0.3, -0.1]), order=3)
    assert np.max(np.abs(j.d2 - j.d2.T)) == 0.0
    once = jets.symmetrize(j)
    twice = jets.symmetrize(once)
    assert np.array_equal(once.d2, twice.d2)
    assert np.array_equal(once.d3, twice.d3)


def test_order_above_smoothness_rejected():
    chart = unit_chart(2)
    f = ScalarField(chart, lambda c: c[0], smoothness=2)
    with pytest.raises(OrderUnsupportedError):
        eval_jet(f, np.zeros(2), order=3)


def test_out_of_domain_rejected():
    chart = unit_chart(2)
    f = ScalarField.from_expression(chart, "x + y")
    with pytest.raises(OutOfDomainError):
        eval_jet(f, np.array([2.0, 0.0]), order=1)


def test_non_finite_evaluation_raises():
    from confgeo.errors import DerivativeFailureError

    chart = ChartDomain(lo=(-1.0, -1.0), hi=(1.0, 1.0))
    f = ScalarField.from_expression(chart, "log(x)")
    with np.errstate(invalid="ignore"):
        with pytest.raises(DerivativeFailureError):
            eval_jet(f, np.array([-0.5, 0.0]), order=1)


def test_periodic_axis_wraps_instead_of_raising():
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), periodic=(True, False))
    f = ScalarField.from_expression(chart, "sin(2*pi*x) + y")
    j_in = eval_jet(f, np.array([0.25, 0.5]), order=1)
    j_wrapped = eval_jet(f, np.array([1.25, 0.5]), order=1)
    assert j_in.value == pytest.approx(j_wrapped.value)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(-2, 2),
       c=st.floats(0.1, 1.5), d=st.floats(-1.5, -0.1))
def test_product_rule_against_fd(a, b, c, d):
    chart = ChartDomain(lo=(-3.0, -3.0), hi=(3.0, 3.0))
    f = ScalarField(chart,
                    lambda t: (a + t[0] * c) * jets.sin(t[1] * d + b))
    x = np.array([0.7, -0.4])
    j = eval_jet(f, x, order=2, backend="dual")
    h = 1e-5

    def val(p):
        return (a + p[0] * c) * np.sin(p[1] * d + b)

    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        fd = (val(x + e) - val(x - e)) / (2 * h)
        assert j.d1[i] == pytest.approx(fd, abs=1e-6)


def test_batched_matches_pointwise():
    chart = unit_chart(2)
    f = ScalarField.from_expression(chart, "exp(0.3*x)*sin(y)")
    pts = np.array([[0.1, 0.2], [-0.3, 0.4], [0.0, 0.0]])
    jb = eval_jet(f, pts, order=2)
    for k, p in enumerate(pts):
        jp = eval_jet(f, p, order=2)
        assert np.allclose(jb.value[k], jp.value, atol=1e-15)
        assert np.allclose(jb.d2[k], jp.d2, atol=1e-15)


def test_kernel_paths_match():
    # the numba kernels and the numpy fallbacks must agree bit for bit
    from confgeo import _kernels_numba, _kernels_numpy

    rng = np.random.default_rng(7)
    b, n = 5, 3
    args = [rng.normal(size=(b,)), rng.normal(size=(b, n)),
            rng.normal(size=(b, n, n)), rng.normal(size=(b, n, n, n)),
            rng.normal(size=(b,)), rng.normal(size=(b, n)),
            rng.normal(size=(b, n, n)), rng.normal(size=(b, n, n, n))]
    args = [np.ascontiguousarray(a) for a in args]
    out_np = _kernels_numpy.jet_mul_o3(*args)
    out_nb = _kernels_numba.jet_mul_o3(*args)
    for a, b_ in zip(out_np, out_nb):
        assert np.array_equal(a, b_)

    a_samples = np.ascontiguousarray(rng.normal(size=(9, n, n)) * 0.1)
    p_np = _kernels_numpy.rk4_transport(a_samples, 0.25)
    p_nb = _kernels_numba.rk4_transport(a_samples, 0.25)
    assert np.array_equal(p_np, p_nb)
