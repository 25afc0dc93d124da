"""Triple warped products: construction, the conjugate-metric identity,
reducibility certificates, factor recovery, and alignment diagnostics.

The construction takes three factor blocks (dims >= 1) and a non-constant
warp on the middle factor, producing the block metric
g = g1 + g2 + e^{-2 phi} g3 together with its conformal partner
g~ = e^{2 phi}(g1 + g2) + g3, assembled blockwise so that the partner is
itself a triple warped product of the swapped data with warp -phi, bit for
bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import jets
from .chart import ChartDomain
from .curvature import MetricField
from .errors import (
    ConstantWarpingError,
    DimensionMismatchError,
    NotConformalError,
    NotOrthogonalError,
)
from .exterior import (
    distribution_volume_form,
    form_norm,
    musical_sharp,
    wedge_full,
)
from .expressions import compile_expression
from .fields import ScalarField
from .holonomy import (
    Distribution,
    classify_holonomy,
    constant_distribution,
    coordinate_block_distribution,
    distribution_parallel_residual,
)

_FACTOR_NAME_POOLS = (("x", "y"), ("s", "t"), ("u", "v", "w"))


@dataclass
class FactorSpec:
    """One factor of a triple warped product (dimension may be 1)."""

    dim: int
    lo: tuple
    hi: tuple
    rows_fn: Callable  # factor-local coords (list) -> dim x dim nested rows
    names: tuple = ()
    periodic: tuple = ()
    grid_res: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionMismatchError("factor dimension must be at least 1")
        if len(self.lo) != self.dim or len(self.hi) != self.dim:
            raise DimensionMismatchError("factor bounds must match its dimension")
        if not self.names:
            self.names = tuple(f"q{i}" for i in range(self.dim))
        if not self.periodic:
            self.periodic = (False,) * self.dim
        if not self.grid_res:
            self.grid_res = (8,) * self.dim

    @classmethod
    def flat(cls, dim, lo=-1.0, hi=1.0, names=()):
        eye = [[1.0 if i == j else 0.0 for j in range(dim)] for i in range(dim)]
        return cls(dim, (lo,) * dim, (hi,) * dim, lambda coords: eye, names=names)

    @classmethod
    def from_expressions(cls, dim, lo, hi, rows, names, **kw):
        compiled = [[compile_expression(e, names) for e in row] for row in rows]

        def rows_fn(coords):
            return [[entry(coords) for entry in row] for row in compiled]

        return cls(dim, tuple(lo), tuple(hi), rows_fn, names=tuple(names), **kw)

    def scaled_by_warp(self, warp_fn, weight):
        """The factor metric multiplied by e^{weight * warp(factor coords)}."""

        def rows_fn(coords):
            scale = jets.exp(weight * warp_fn(coords))
            return [[scale * entry for entry in row] for row in self.rows_fn(coords)]

        return FactorSpec(self.dim, self.lo, self.hi, rows_fn, self.names,
                          self.periodic, self.grid_res)


@dataclass
class TripleWarpedSpec:
    """Factors (dims n1, n2, n3 >= 1) and a non-constant warp on factor 2."""

    factor1: FactorSpec
    factor2: FactorSpec
    factor3: FactorSpec
    warp_fn: Callable  # factor-2 local coords -> scalar
    warp_text: str = ""

    @classmethod
    def with_expression_warp(cls, factor1, factor2, factor3, warp):
        return cls(factor1, factor2, factor3,
                   compile_expression(warp, factor2.names), warp_text=warp)


@dataclass
class TripleWarpedPair:
    spec: TripleWarpedSpec
    chart: ChartDomain
    g: MetricField
    g_tilde: MetricField
    phi: ScalarField  # warp pulled back to the product chart
    t1: Distribution
    t2: Distribution
    t3: Distribution
    dims: tuple

    @property
    def t12_projector(self):
        n = self.chart.dim
        mat = np.zeros((n, n))
        for a in range(self.dims[0] + self.dims[1]):
            mat[a, a] = 1.0
        return mat

    @property
    def t12(self) -> Distribution:
        return constant_distribution(self.t12_projector, self.dims[0] + self.dims[1])

    @property
    def t23(self) -> Distribution:
        n = self.chart.dim
        mat = np.zeros((n, n))
        for a in range(self.dims[0], n):
            mat[a, a] = 1.0
        return constant_distribution(mat, self.dims[1] + self.dims[2])


def _product_chart(factors):
    lo, hi, periodic, grid, names = [], [], [], [], []
    seen = {}
    for f in factors:
        lo += list(f.lo)
        hi += list(f.hi)
        periodic += list(f.periodic)
        grid += list(f.grid_res)
        for name in f.names:
            if name in seen:
                seen[name] += 1
                names.append(f"{name}{seen[name]}")
            else:
                seen[name] = 1
                names.append(name)
    return ChartDomain(tuple(lo), tuple(hi), tuple(periodic), tuple(grid), tuple(names))


def _assemble_block_metric(chart, factors, block_scales, name):
    """Block-diagonal metric; block_scales[f] multiplies block f (or None).

    Scales are callables of the full product coordinates, evaluated once per
    point and applied with a single multiplication per entry so that equal
    scale expressions produce bitwise-equal metrics.
    """
    dims = [f.dim for f in factors]
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    n = int(offsets[-1])

    def matrix(coords):
        rows = [[0.0] * n for _ in range(n)]
        for f, factor in enumerate(factors):
            sub = coords[offsets[f]:offsets[f + 1]]
            block = factor.rows_fn(sub)
            scale = block_scales[f](coords) if block_scales[f] is not None else None
            for i in range(factor.dim):
                for j in range(factor.dim):
                    entry = block[i][j]
                    if scale is not None:
                        entry = scale * entry
                    rows[offsets[f] + i][offsets[f] + j] = entry
        return rows

    return MetricField(chart, matrix, name=name)


def build_triple_warped(spec: TripleWarpedSpec) -> TripleWarpedPair:
    """Assemble the pair (g, g~) with coordinate-block distributions."""
    factors = [spec.factor1, spec.factor2, spec.factor3]
    dims = tuple(f.dim for f in factors)
    chart = _product_chart(factors)
    n1, n2, _ = dims

    _reject_constant_warp(spec)

    def warp_on_product(coords):
        return spec.warp_fn(coords[n1:n1 + n2])

    phi = ScalarField(chart, warp_on_product, name=spec.warp_text or "warp")

    def scale_minus(coords):
        return jets.exp(-2.0 * warp_on_product(coords))

    def scale_plus(coords):
        return jets.exp(2.0 * warp_on_product(coords))

    g = _assemble_block_metric(chart, factors, [None, None, scale_minus],
                               name="triple-warped g")
    g_tilde = _assemble_block_metric(chart, factors, [scale_plus, scale_plus, None],
                                     name="triple-warped g~")

    n = chart.dim
    t1 = coordinate_block_distribution(n, range(0, n1))
    t2 = coordinate_block_distribution(n, range(n1, n1 + n2))
    t3 = coordinate_block_distribution(n, range(n1 + n2, n))
    return TripleWarpedPair(spec, chart, g, g_tilde, phi, t1, t2, t3, dims)


def _reject_constant_warp(spec: TripleWarpedSpec):
    f2 = spec.factor2
    axes = [np.linspace(f2.lo[i], f2.hi[i], 5) for i in range(f2.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    coords = [m.ravel() for m in mesh]
    vals = np.broadcast_to(np.asarray(spec.warp_fn(coords), dtype=float),
                           coords[0].shape)
    if np.max(vals) - np.min(vals) < 1e-12:
        raise ConstantWarpingError("warping function is constant on factor 2")


def conjugate_identity_residual(pair: TripleWarpedPair, res=4) -> float:
    """g~ versus the independently assembled swapped product with warp -phi.

    The identity is arithmetic; with matching evaluation paths the residual
    is exactly zero.
    """
    spec = pair.spec
    n1, n2, n3 = pair.dims
    swapped_factors = [
        spec.factor3,
        spec.factor2.scaled_by_warp(spec.warp_fn, 2.0),
        spec.factor1,
    ]
    swapped_chart = _product_chart(swapped_factors)

    def neg_warp(coords):
        return -spec.warp_fn(coords[n3:n3 + n2])

    def scale_minus(coords):
        return jets.exp(-2.0 * neg_warp(coords))

    swapped = _assemble_block_metric(swapped_chart, swapped_factors,
                                     [None, None, scale_minus], name="swapped")

    # swapped axis j reads original axis perm[j]
    n = pair.chart.dim
    perm = (list(range(n1 + n2, n)) + list(range(n1, n1 + n2)) + list(range(n1)))
    pts = pair.chart.grid(res)
    g_t = pair.g_tilde.values(pts)
    swapped_vals = swapped.values(pts[:, perm])
    inv = np.argsort(perm)
    relocated = swapped_vals[:, inv, :][:, :, inv]
    return float(np.max(np.abs(g_t - relocated)))


class ReducibilityCertificate(NamedTuple):
    res_g: float
    res_g_tilde: float
    label_g: str
    label_g_tilde: str


def reducibility_certificate(pair: TripleWarpedPair, rng=None, samples=150,
                             grid_res=3, backend=None) -> ReducibilityCertificate:
    """Parallel residuals of T1 under g and T3 under g~, plus both labels."""
    rng = rng or np.random.default_rng(0)
    pts = pair.chart.interior_sample(rng, 8)
    res_g = float(np.max([distribution_parallel_residual(pair.g, pair.t1, p,
                                                         backend=backend)
                          for p in pts]))
    res_gt = float(np.max([distribution_parallel_residual(pair.g_tilde, pair.t3, p,
                                                          backend=backend)
                           for p in pts]))
    cls_g = classify_holonomy(pair.g, rng=rng, samples=samples, backend=backend)
    cls_gt = classify_holonomy(pair.g_tilde, rng=rng, samples=samples, backend=backend)
    return ReducibilityCertificate(res_g, res_gt, cls_g.label, cls_gt.label)


class RecoveredFactors(NamedTuple):
    g1: Callable
    g2: Callable
    g3: Callable
    reconstruction_residual: float
    g2_consistency: float  # gap between the two displayed expressions for g2
    g2_kernel_defect: float  # g2 restricted to T1 + T3
    phi_crosscheck: float  # recovered vs supplied warp


def recover_factors(g: MetricField, g_tilde: MetricField, t1: Distribution,
                    t3: Distribution, phi: ScalarField, sample_points=None,
                    parallel_tol=1e-5, backend=None) -> RecoveredFactors:
    """Recover the three block metrics from (g, g~, T1, T3, phi).

    g1 is g restricted to T1, g3 is g~ restricted to T3, and
    g2 = (g - g1) - e^{-2 phi} g3 = e^{-2 phi}(g~ - g3) - g1; the residual
    reports max |g - (g1 + g2 + e^{-2 phi} g3)| over the sample grid.
    """
    chart = g.chart
    if sample_points is None:
        sample_points = chart.interior_grid(3)
    pts = np.asarray(sample_points, dtype=float)

    p1 = np.asarray(t1.projector(pts), dtype=float)
    p3 = np.asarray(t3.projector(pts), dtype=float)
    if np.max(np.abs(p1 @ p3)) > 1e-4:
        raise NotOrthogonalError("T1 and T3 are not orthogonal")

    g_vals = g.values(pts)
    gt_vals = g_tilde.values(pts)
    phi_vals = phi(pts)
    scale = np.exp(2.0 * phi_vals)[..., None, None]
    conf_defect = np.max(np.abs(gt_vals - scale * g_vals) / (1.0 + np.abs(gt_vals)))
    if conf_defect > 1e-10:
        raise NotConformalError(
            f"g~ deviates from e^(2 phi) g by {conf_defect:.3e}")

    for dist, metric, tag in ((t1, g, "T1/g"), (t3, g_tilde, "T3/g~")):
        res = max(distribution_parallel_residual(metric, dist, p, backend=backend)
                  for p in pts[:: max(1, len(pts) // 6)])
        if res > parallel_tol:
            raise NotOrthogonalError(
                f"{tag} parallel residual {res:.3e} above {parallel_tol}")

    def restrict(vals, proj):
        return np.einsum("...ki,...kl,...lj->...ij", proj, vals, proj)

    def g1_at(x):
        return restrict(g.values(x), np.asarray(t1.projector(x), dtype=float))

    def g3_at(x):
        return restrict(g_tilde.values(x), np.asarray(t3.projector(x), dtype=float))

    def g2_at(x):
        gv = g.values(x)
        em = np.exp(-2.0 * phi(x))[..., None, None]
        return gv - g1_at(x) - em * g3_at(x)

    g1_vals = restrict(g_vals, p1)
    g3_vals = restrict(gt_vals, p3)
    em = np.exp(-2.0 * phi_vals)[..., None, None]
    g2_a = (g_vals - g1_vals) - em * g3_vals
    g2_b = em * (gt_vals - g3_vals) - g1_vals
    g2_consistency = float(np.max(np.abs(g2_a - g2_b)))

    recon = g1_vals + g2_a + em * g3_vals
    residual = float(np.max(np.abs(g_vals - recon)))

    p13 = p1 + p3
    kernel_defect = float(np.max(np.abs(
        np.einsum("...ki,...kl,...lj->...ij", p13, g2_a, p13))))

    # cross-check phi from the conformal relation along a T1 direction
    u = _unit_range_vector(p1, g_vals)
    num = np.einsum("...i,...ij,...j->...", u, gt_vals, u)
    den = np.einsum("...i,...ij,...j->...", u, g_vals, u)
    phi_rec = 0.5 * np.log(num / den)
    phi_crosscheck = float(np.max(np.abs(phi_rec - phi_vals)))

    return RecoveredFactors(g1_at, g2_at, g3_at, residual, g2_consistency,
                            kernel_defect, phi_crosscheck)


def _unit_range_vector(proj, g_vals):
    """A g-unit vector in the range of the projector (batched)."""
    n = proj.shape[-1]
    cols = np.einsum("...ij->...j", np.abs(proj))
    j = int(np.argmax(cols.reshape(-1, n)[0]))
    u = proj[..., :, j]
    norm = np.sqrt(np.einsum("...i,...ij,...j->...", u, g_vals, u))
    return u / norm[..., None]


class AlignmentRecord(NamedTuple):
    wedge_m2: float  # |d phi ^ vol(T12)|_g, zero iff grad phi in T12
    wedge_m1: float  # |d phi ^ vol(T3)|_g, zero iff grad phi in T3
    m1_defect: float  # |(I - P3) grad phi|_g
    m2_defect: float  # |(I - P12) grad phi|_g
    c1_defect: float  # inclusion defect T1 in T3
    c2_defect: float  # inclusion defect T1 in T12
    cover_defect: float  # max over points of min(m1, m2)


def alignment_diagnostics(g: MetricField, phi: ScalarField, t1: Distribution,
                          t12: Distribution, t3: Distribution, x,
                          backend=None) -> AlignmentRecord:
    """Pointwise membership/inclusion diagnostics for the warped alignment.

    The wedge residuals express the membership sets in exterior form: the
    gradient lies in a parallel distribution exactly when d phi wedged with
    that distribution's volume form vanishes.
    """
    x = np.asarray(x, dtype=float)
    n = g.chart.dim
    g_vals = g.values(x)
    g_inv = np.linalg.inv(g_vals)
    pj = phi.jet(x, order=1, backend=backend)
    dphi = pj.d1
    grad = musical_sharp(g_vals, dphi)

    vol12 = distribution_volume_form(g, t12, x)
    vol3 = distribution_volume_form(g, t3, x)
    w_m2 = form_norm(g_inv, wedge_full(dphi, vol12, 1, t12.rank, n), t12.rank + 1)
    w_m1 = form_norm(g_inv, wedge_full(dphi, vol3, 1, t3.rank, n), t3.rank + 1)

    p12 = np.asarray(t12.projector(x), dtype=float)
    p3 = np.asarray(t3.projector(x), dtype=float)
    p1 = np.asarray(t1.projector(x), dtype=float)
    eye = np.eye(n)

    def gnorm(vec):
        return np.sqrt(np.einsum("...i,...ij,...j->...", vec, g_vals, vec))

    m1 = gnorm(np.einsum("...ij,...j->...i", eye - p3, grad))
    m2 = gnorm(np.einsum("...ij,...j->...i", eye - p12, grad))
    from .curvature import matrix_opnorm

    c1 = matrix_opnorm((eye - p3) @ p1)
    c2 = matrix_opnorm((eye - p12) @ p1)
    return AlignmentRecord(
        float(np.max(w_m2)), float(np.max(w_m1)),
        float(np.max(m1)), float(np.max(m2)),
        float(np.max(c1)), float(np.max(c2)),
        float(np.max(np.minimum(m1, m2))),
    )


def split_from_holonomy(pair: TripleWarpedPair, rng=None, samples=150,
                        backend=None):
    """T1 and T3 recovered from holonomy estimates instead of construction.

    T1 is the complement of the g-invariant distribution containing
    grad phi; T3 is the complement of the g~-invariant distribution
    containing grad phi.
    """
    rng = rng or np.random.default_rng(0)
    cls_g = classify_holonomy(pair.g, rng=rng, samples=samples, backend=backend)
    cls_gt = classify_holonomy(pair.g_tilde, rng=rng, samples=samples,
                               backend=backend)
    x0 = cls_g.estimate.basepoint
    gl = pair.phi.jet(x0, order=1)
    grad = musical_sharp(pair.g.values(x0), gl.d1)
    t1 = _complement_of_containing(cls_g.invariant_distributions, grad, x0,
                                   pair.chart.dim)
    grad_t = musical_sharp(pair.g_tilde.values(x0), gl.d1)
    t3 = _complement_of_containing(cls_gt.invariant_distributions, grad_t, x0,
                                   pair.chart.dim)
    return t1, t3, cls_g, cls_gt


def _complement_of_containing(distributions, vector, x0, n):
    best, best_score = None, -1.0
    for dist in distributions:
        p = np.asarray(dist.projector(x0), dtype=float)
        score = float(np.linalg.norm(p @ vector))
        if score > best_score:
            best, best_score = dist, score
    if best is None:
        raise NotOrthogonalError("no invariant distribution contains the gradient")
    p_best = np.asarray(best.projector(x0), dtype=float)

    comp_rank = n - best.rank

    def projector(x):
        p = np.asarray(best.projector(x), dtype=float)
        eye = np.broadcast_to(np.eye(n), p.shape)
        return eye - p

    return Distribution(rank=comp_rank, projector=projector,
                        constant=getattr(best, "constant", False))
