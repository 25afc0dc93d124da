"""Triple warped products: build, conjugate identity, recovery, alignment."""

import numpy as np
import pytest

from confgeo.errors import (
    ConstantWarpingError,
    NotConformalError,
    NotOrthogonalError,
)
from confgeo.fields import ScalarField
from confgeo.library import random_triple_warped_pair, random_triple_warped_spec
from confgeo.triple_warped import (
    FactorSpec,
    TripleWarpedSpec,
    alignment_diagnostics,
    build_triple_warped,
    conjugate_identity_residual,
    recover_factors,
    reducibility_certificate,
    split_from_holonomy,
)


def example_pair():
    f1 = FactorSpec.flat(1, names=("x",))
    f2 = FactorSpec.flat(1, names=("t",))
    f3 = FactorSpec.flat(2, names=("u", "v"))
    spec = TripleWarpedSpec.with_expression_warp(f1, f2, f3, "sin(t)")
    return build_triple_warped(spec)


def test_build_example_metric_blocks():
    pair = example_pair()
    x = np.array([0.2, 0.4, -0.1, 0.3])
    g = pair.g.values(x)
    w = np.exp(-2.0 * np.sin(0.4))
    assert np.allclose(g, np.diag([1.0, 1.0, w, w]))
    gt = pair.g_tilde.values(x)
    s = np.exp(2.0 * np.sin(0.4))
    assert np.allclose(gt, np.diag([s, s, 1.0, 1.0]))


def test_warp_does_not_depend_on_outer_factors():
    pair = example_pair()
    pts = pair.chart.interior_sample(np.random.default_rng(0), 5)
    d1 = pair.phi.jet(pts, order=1).d1
    assert np.max(np.abs(d1[:, [0, 2, 3]])) == 0.0


def test_conformal_relation_machine_precision(rng):
    pair = random_triple_warped_pair(rng)
    pts = pair.chart.interior_sample(rng, 6)
    gt = pair.g_tilde.values(pts)
    expected = np.exp(2.0 * pair.phi(pts))[:, None, None] * pair.g.values(pts)
    assert np.max(np.abs(gt - expected) / (1.0 + np.abs(expected))) < 5e-16


def test_constant_warp_rejected():
    f1 = FactorSpec.flat(1, names=("x",))
    f2 = FactorSpec.flat(1, names=("t",))
    f3 = FactorSpec.flat(2, names=("u", "v"))
    with pytest.raises(ConstantWarpingError):
        build_triple_warped(
            TripleWarpedSpec.with_expression_warp(f1, f2, f3, "0*t + 2"))


def test_conjugate_identity_exact():
    pair = example_pair()
    assert conjugate_identity_residual(pair) == 0.0


def test_conjugate_identity_random_suite(rng):
    worst = 0.0
    for _ in range(10):
        pair = random_triple_warped_pair(rng)
        worst = max(worst, conjugate_identity_residual(pair))
    assert worst == 0.0


def test_recovery_round_trip(rng):
    pair = random_triple_warped_pair(rng)
    rec = recover_factors(pair.g, pair.g_tilde, pair.t1, pair.t3, pair.phi)
    assert rec.reconstruction_residual < 1e-10
    assert rec.g2_consistency < 1e-10
    assert rec.g2_kernel_defect < 1e-10
    assert rec.phi_crosscheck < 1e-10


def test_recovered_g2_positive_on_t2(rng):
    pair = random_triple_warped_pair(rng, dims=(1, 2, 1))
    rec = recover_factors(pair.g, pair.g_tilde, pair.t1, pair.t3, pair.phi)
    pts = pair.chart.interior_grid(2)
    g2 = rec.g2(pts)
    block = g2[:, 1:3, 1:3]
    eig = np.linalg.eigvalsh(block)
    assert np.min(eig) > 0.1


def test_recovery_rejects_wrong_conformal_factor():
    pair = example_pair()
    shifted = ScalarField(pair.chart,
                          lambda coords: pair.phi.fn(coords) + 0.05)
    with pytest.raises(NotConformalError):
        recover_factors(pair.g, pair.g_tilde, pair.t1, pair.t3, shifted)


def test_recovery_rejects_non_orthogonal():
    pair = example_pair()
    with pytest.raises(NotOrthogonalError):
        recover_factors(pair.g, pair.g_tilde, pair.t1, pair.t1, pair.phi)


def test_alignment_diagnostics_constructed_pair(rng):
    pair = example_pair()
    rec = alignment_diagnostics(pair.g, pair.phi, pair.t1, pair.t12, pair.t3,
                                pair.chart.interior_grid(2))
    assert rec.wedge_m2 < 1e-10  # grad phi in T12 in wedge form
    assert rec.m2_defect < 1e-10
    assert rec.c2_defect < 1e-10  # T1 inside T12
    assert rec.cover_defect < 1e-10  # M1 u M2 covers the chart
    assert rec.c1_defect > 0.9  # T1 not inside T3


def test_alignment_flags_adversarial_warp():
    pair = example_pair()
    bad_phi = ScalarField.from_expression(pair.chart, "0.5*sin(u)")
    rec = alignment_diagnostics(pair.g, bad_phi, pair.t1, pair.t12, pair.t3,
                                pair.chart.interior_grid(2))
    assert rec.m2_defect > 0.01


def test_reducibility_certificate(rng):
    pair = example_pair()
    cert = reducibility_certificate(pair, rng=rng, samples=100)
    assert cert.res_g < 1e-8
    assert cert.res_g_tilde < 1e-8
    assert cert.label_g == "reducible"
    assert cert.label_g_tilde == "reducible"


def test_holonomy_pipeline_recovery(rng):
    pair = example_pair()
    t1, t3, cls_g, cls_gt = split_from_holonomy(pair, rng=rng, samples=100)
    assert cls_g.label == "reducible"
    assert cls_gt.label == "reducible"
    rec = recover_factors(pair.g, pair.g_tilde, t1, t3, pair.phi)
    assert rec.reconstruction_residual < 1e-5
    assert rec.phi_crosscheck < 1e-5


def test_random_spec_dims_and_names(rng):
    for _ in range(5):
        spec = random_triple_warped_spec(rng)
        pair = build_triple_warped(spec)
        n = sum(pair.dims)
        assert pair.chart.dim == n
        assert len(set(pair.chart.names)) == n
