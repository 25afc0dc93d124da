"""Registry of verification checks.

Every check verifies one mathematical identity or golden behavior, carries
an anchor string naming that identity, a tolerance per differentiation
backend, and a runner returning the worst residual it observed.  Checks are
deterministic given the scenario seed.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import library
from .chart import ChartDomain, frame_gram_schmidt, integrate_chart
from .conformal import (
    conformal_vector_residual,
    connection_law_residual,
    einstein_pair_diagnostics,
    mobius_einstein_pair,
    rescale,
    scalar_law_residual,
    trace_free_ricci_residual,
)
from .curvature import MetricField, grad_laplace, volume_density_field
from .errors import NotParallelError
from .exterior import (
    PForm,
    basic_form_residual,
    codifferential,
    codifferential_via_star,
    conformal_form_transport,
    expand_coefficients,
    form_norm,
    hodge_full,
    index_combos,
    interior_full,
    l2_adjointness,
    musical_flat,
    twistor_killing_residual,
    wedge_full,
)
from .fields import ScalarField, VectorField, eval_jet
from .holonomy import (
    classify_holonomy,
    coordinate_block_distribution,
    curvature_span_dim,
    default_loop_family,
    distribution_parallel_residual,
    path_transport_matrix,
    rectangle_loop,
    sample_holonomy,
    verify_parallel_field,
)
from .library import (
    parallel_certificate_config,
    random_conformal_pair,
    random_metric,
    random_pform,
    random_scalar_field,
    random_triple_warped_pair,
    sphere_metric,
    unit_chart,
)
from .triple_warped import (
    alignment_diagnostics,
    conjugate_identity_residual,
    recover_factors,
    reducibility_certificate,
)


@dataclass
class Context:
    seed: int
    backend: str = "dual"
    params: dict = field(default_factory=dict)

    def rng(self, check_id: str):
        return np.random.default_rng([self.seed, zlib.crc32(check_id.encode())])

    def param(self, key, default):
        return self.params.get(key, default)


class CheckResult(NamedTuple):
    residual: float
    detail: str = ""


@dataclass
class CheckDef:
    check_id: str
    anchor: str
    tol_dual: float
    tol_fd: float
    runner: Callable

    def tolerance(self, backend: str, scale: float = 1.0) -> float:
        base = self.tol_dual if backend == "dual" else self.tol_fd
        return base * scale


REGISTRY: dict[str, CheckDef] = {}


def register(check_id, anchor, tol_dual, tol_fd=None):
    def wrap(fn):
        REGISTRY[check_id] = CheckDef(check_id, anchor, tol_dual,
                                      tol_fd if tol_fd is not None else tol_dual, fn)
        return fn

    return wrap


def run_check(check_id: str, ctx: Context, tol_override=None, tol_scale=1.0):
    from time import perf_counter

    from .report import CheckRecord

    cd = REGISTRY[check_id]
    tol = tol_override if tol_override is not None else cd.tolerance(ctx.backend, tol_scale)
    t0 = perf_counter()
    result = cd.runner(ctx)
    wall = perf_counter() - t0
    residual = float(result.residual)
    return CheckRecord(check_id, cd.anchor, residual, tol, residual <= tol,
                       wall, result.detail)


def audit_anchors():
    """Every registered check must carry a non-empty anchor string."""
    missing = [cid for cid, cd in REGISTRY.items() if not cd.anchor.strip()]
    return missing


# ---------------------------------------------------------------- chart core


@register("chart.backend-agreement",
          "dual-number and order-4 finite-difference jets agree to O(h^4)",
          1e-7, 1e-7)
def _chart_backend_agreement(ctx):
    rng = ctx.rng("chart.backend-agreement")
    worst = 0.0
    for dim in (2, 3):
        chart = unit_chart(dim)
        for _ in range(ctx.param("fields", 4)):
            f = random_scalar_field(chart, rng, amplitude=0.8)
            pts = chart.interior_grid(2)
            jd = eval_jet(f, pts, order=2, backend="dual")
            jf = eval_jet(f, pts, order=2, backend="fd")
            worst = max(worst,
                        float(np.max(np.abs(jd.d1 - jf.d1))),
                        float(np.max(np.abs(jd.d2 - jf.d2))))
    return CheckResult(worst)


@register("chart.periodic-integral",
          "the integral of lap(phi) over a closed chart vanishes",
          1e-10, 1e-8)
def _chart_periodic_integral(ctx):
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), periodic=(True, True),
                        grid_res=(32, 32))
    g = MetricField.flat(chart)
    phi = ScalarField.from_expression(chart, "sin(2*pi*x) + 0.5*cos(2*pi*y)")

    def integrand(coords):
        pts = np.stack(coords, axis=-1)
        return grad_laplace(g, phi, pts, backend=ctx.backend).laplace

    total = integrate_chart(integrand, chart, density=volume_density_field(g))
    return CheckResult(abs(total))


@register("chart.gram-schmidt",
          "the frame returned by metric Gram-Schmidt has Gram matrix identity",
          1e-12, 1e-12)
def _chart_gram_schmidt(ctx):
    rng = ctx.rng("chart.gram-schmidt")
    worst = 0.0
    for n in (2, 3, 4, 5):
        a = rng.normal(size=(6, n, n))
        g = np.eye(n) + 0.5 * (a @ np.swapaxes(a, -1, -2)) / n
        e = frame_gram_schmidt(g)
        gram = np.einsum("...ia,...ij,...jb->...ab", e, g, e)
        worst = max(worst, float(np.max(np.abs(gram - np.eye(n)))))
    return CheckResult(worst)


# ---------------------------------------------------------------- conformal


def _conformal_sweep(ctx, check_id, op):
    rng = ctx.rng(check_id)
    dims = ctx.param("dims", (2, 3, 4))
    count = ctx.param("pairs", 12)
    worst = 0.0
    for k in range(count):
        dim = dims[k % len(dims)]
        chart = unit_chart(dim)
        pair = random_conformal_pair(chart, rng)
        pts = chart.interior_sample(rng, ctx.param("points", 3))
        worst = max(worst, float(op(pair, pts)))
    return CheckResult(worst, detail=f"{count} pairs, dims {tuple(dims)}")


@register("conformal.connection-law",
          "nabla~_X Y = nabla_X Y + dphi(X) Y + dphi(Y) X - g(X,Y) grad phi",
          1e-6, 1e-4)
def _conn_law(ctx):
    return _conformal_sweep(ctx, "conformal.connection-law",
                            lambda pair, pts: connection_law_residual(
                                pair, pts, backend=ctx.backend))


@register("conformal.trace-free-ricci",
          "Ric0(g~) = Ric0(g) - (n-2)(nabla dphi - dphi@dphi)"
          " - ((n-2)/n)(lap phi + |dphi|^2) g",
          1e-6, 1e-4)
def _tfr_law(ctx):
    return _conformal_sweep(ctx, "conformal.trace-free-ricci",
                            lambda pair, pts: trace_free_ricci_residual(
                                pair, pts, backend=ctx.backend))


@register("conformal.scalar-law",
          "e^{2phi} Scal(g~) = Scal(g) + 2(n-1) lap phi - (n-2)(n-1) |dphi|^2",
          1e-6, 1e-4)
def _scalar_law(ctx):
    return _conformal_sweep(ctx, "conformal.scalar-law",
                            lambda pair, pts: scalar_law_residual(
                                pair, pts, backend=ctx.backend).r1)


@register("conformal.involution",
          "rescaling by phi then by -phi returns the original metric",
          1e-14, 1e-14)
def _involution(ctx):
    rng = ctx.rng("conformal.involution")
    chart = unit_chart(3)
    g = random_metric(chart, rng)
    phi = random_scalar_field(chart, rng)
    pair = rescale(g, phi)
    neg_phi = ScalarField(chart, lambda coords: -phi.fn(coords), name="-phi")
    back = rescale(pair.g_tilde, neg_phi)
    pts = chart.interior_sample(rng, 5)
    return CheckResult(float(np.max(np.abs(back.g_tilde.values(pts) - g.values(pts)))))


@register("conformal.vector-invariance",
          "the trace-free Lie-derivative residual is invariant under"
          " conformal change of the metric",
          1e-10, 1e-10)
def _vector_invariance(ctx):
    rng = ctx.rng("conformal.vector-invariance")
    chart = unit_chart(3)
    g = random_metric(chart, rng)
    phi = random_scalar_field(chart, rng)
    xi = library.random_vector_field(chart, rng)
    pair = rescale(g, phi)
    pts = chart.interior_sample(rng, 4)
    a = conformal_vector_residual(g, xi, pts, backend=ctx.backend).conformal
    b = conformal_vector_residual(pair.g_tilde, xi, pts, backend=ctx.backend).conformal
    return CheckResult(abs(a - b))


@register("conformal.einstein-pair",
          "nabla(e^{-phi} dphi) = (e^{-phi} f) g with"
          " f = -(1/n)(lap phi + |dphi|^2), and e^{-phi} = |x|^2 + c gives an"
          " Einstein partner",
          1e-5, 1e-4)
def _einstein_pair(ctx):
    rng = ctx.rng("conformal.einstein-pair")
    worst = 0.0
    for dim in ctx.param("dims", (3, 4)):
        chart = unit_chart(dim)
        pair = mobius_einstein_pair(chart, c=1.0)
        pts = chart.interior_sample(rng, 4)
        d = einstein_pair_diagnostics(pair, pts, backend=ctx.backend)
        worst = max(worst, d.ric0_g, d.ric0_g_tilde, d.ng_residual)
    return CheckResult(worst)


@register("conformal.mobius-vector",
          "xi = (e^{-phi} dphi)# is conformal Killing but not Killing for"
          " the flat/inversion pair",
          1e-6, 1e-5)
def _mobius_vector(ctx):
    rng = ctx.rng("conformal.mobius-vector")
    chart = unit_chart(3)
    pair = mobius_einstein_pair(chart, c=1.0)
    names = chart.names
    xi = VectorField.from_expressions(chart, [f"-2*{nm}" for nm in names])
    pts = chart.interior_sample(rng, 4)
    res = conformal_vector_residual(pair.g, xi, pts, backend=ctx.backend)
    killing_floor = 1e-2
    penalty = 0.0 if res.killing > killing_floor else 1.0
    return CheckResult(res.conformal + penalty,
                       detail=f"killing residual {res.killing:.3e} (must exceed"
                              f" {killing_floor})")


@register("conformal.parallel-scalar-identity",
          "Scal(g) = -(n-2)(lap phi + |dphi|^2) when g has a parallel unit"
          " field compatible with phi and g~ is Einstein",
          1e-6, 1e-4)
def _parallel_scalar(ctx):
    rng = ctx.rng("conformal.parallel-scalar-identity")
    pair, xi = parallel_certificate_config()
    pts = pair.chart.interior_sample(rng, 4)
    res = scalar_law_residual(pair, pts, xi0=xi, backend=ctx.backend)
    return CheckResult(max(res.parallel_identity, res.r2, res.hypothesis_defect))


@register("conformal.parallel-detect",
          "transport-based parallelism detection rejects a perturbed field",
          0.5, 0.5)
def _parallel_detect(ctx):
    pair, _ = parallel_certificate_config()
    chart = pair.chart
    bad = VectorField.from_expressions(chart, ["1", "0.01*sin(3*x)", "0"])
    x0 = np.array([0.1, 0.0, 1.0])
    try:
        verify_parallel_field(pair.g, bad, x0, tol=1e-6, backend=ctx.backend)
    except NotParallelError:
        return CheckResult(0.0, detail="perturbation 1e-2 detected")
    return CheckResult(1.0, detail="perturbed field passed as parallel")


# ---------------------------------------------------------------- exterior


def _transport_sweep(ctx, check_id, pick):
    rng = ctx.rng(check_id)
    count = ctx.param("triples", 10)
    dims = ctx.param("dims", (3, 4))
    worst = 0.0
    for k in range(count):
        dim = dims[k % len(dims)]
        chart = unit_chart(dim)
        pair = random_conformal_pair(chart, rng)
        degree = int(rng.integers(1, dim))
        psi = random_pform(chart, rng, degree)
        pts = chart.interior_sample(rng, 2)
        res = conformal_form_transport(pair, psi, pts, backend=ctx.backend)
        worst = max(worst, float(pick(res)))
    return CheckResult(worst, detail=f"{count} (g, phi, psi) triples")


@register("exterior.transport-d",
          "d psi~ = e^{(p+1)phi} (d psi + (p+1) dphi ^ psi)",
          1e-6, 1e-4)
def _transport_d(ctx):
    return _transport_sweep(ctx, "exterior.transport-d", lambda r: r.d_res)


@register("exterior.transport-nabla",
          "nabla~_X psi~ = e^{(p+1)phi} (nabla_X psi + dphi(X) psi"
          " + X^b ^ (grad phi i psi) - dphi ^ (X i psi))",
          1e-6, 1e-4)
def _transport_nabla(ctx):
    return _transport_sweep(ctx, "exterior.transport-nabla", lambda r: r.nabla_res)


@register("exterior.transport-delta",
          "delta~ psi~ = e^{(p-1)phi} (delta psi - (n-p+1) grad phi i psi)",
          1e-6, 1e-4)
def _transport_delta(ctx):
    return _transport_sweep(ctx, "exterior.transport-delta", lambda r: r.delta_res)


@register("exterior.twistor-invariance",
          "psi conformal Killing for g iff e^{(p+1)phi} psi conformal"
          " Killing for g~ (checked on parallel forms)",
          1e-6, 1e-4)
def _twistor_invariance(ctx):
    rng = ctx.rng("exterior.twistor-invariance")
    worst = 0.0
    for dim in ctx.param("dims", (3, 4)):
        chart = unit_chart(dim)
        flat = MetricField.flat(chart)
        for degree in range(1, dim):
            psi = library.parallel_pform(chart, rng, degree)
            phi = random_scalar_field(chart, rng)
            pair = rescale(flat, phi)
            psi_t = psi.rescaled(phi, float(degree + 1))
            pts = chart.interior_sample(rng, 3)
            res = twistor_killing_residual(pair.g_tilde, psi_t, pts,
                                           backend=ctx.backend)
            worst = max(worst, float(np.max(res.twistor)))
    return CheckResult(worst)


@register("exterior.hodge-involution",
          "*(*psi) = (-1)^{p(n-p)} psi",
          1e-9, 1e-9)
def _hodge_involution(ctx):
    rng = ctx.rng("exterior.hodge-involution")
    worst = 0.0
    for n in range(2, 6):
        a = rng.normal(size=(4, n, n))
        g = np.eye(n) + 0.4 * (a @ np.swapaxes(a, -1, -2)) / n
        for p in range(0, n + 1):
            coeffs = rng.normal(size=(4, len(index_combos(n, p))))
            psi = expand_coefficients(coeffs, n, p)
            star = hodge_full(g, 1, psi, n, p)
            star2 = hodge_full(g, 1, star, n, n - p)
            sign = (-1.0) ** (p * (n - p))
            worst = max(worst, float(np.max(np.abs(star2 - sign * psi))))
    return CheckResult(worst)


@register("exterior.hodge-interior-wedge",
          "*(X^b ^ psi) = (-1)^p X i (*psi)",
          1e-9, 1e-9)
def _hodge_interior(ctx):
    rng = ctx.rng("exterior.hodge-interior-wedge")
    worst = 0.0
    for n in range(2, 6):
        a = rng.normal(size=(3, n, n))
        g = np.eye(n) + 0.4 * (a @ np.swapaxes(a, -1, -2)) / n
        for p in range(0, n):
            coeffs = rng.normal(size=(3, len(index_combos(n, p))))
            psi = expand_coefficients(coeffs, n, p)
            x_vec = rng.normal(size=(3, n))
            lhs = hodge_full(g, 1, wedge_full(musical_flat(g, x_vec), psi, 1, p, n),
                             n, p + 1)
            star = hodge_full(g, 1, psi, n, p)
            rhs = ((-1.0) ** p) * interior_full(x_vec, star, n - p)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckResult(worst)


@register("exterior.delta-two-routes",
          "-sum_i e_i i nabla_{e_i} psi = (-1)^{n(p-1)-1} * d * psi",
          1e-8, 1e-7)
def _delta_two_routes(ctx):
    rng = ctx.rng("exterior.delta-two-routes")
    worst = 0.0
    for dim in ctx.param("dims", (2, 3)):
        chart = unit_chart(dim)
        g = random_metric(chart, rng, deviation=0.3)
        for degree in range(1, dim + 1):
            psi = random_pform(chart, rng, degree)
            pts = chart.interior_sample(rng, 2)
            frame_route = codifferential(g, psi, pts, backend=ctx.backend)
            star_route = codifferential_via_star(g, psi, pts)
            worst = max(worst, float(np.max(np.abs(frame_route - star_route))))
    return CheckResult(worst)


@register("exterior.d-squared",
          "d(d psi) = 0",
          1e-8, 1e-6)
def _d_squared(ctx):
    rng = ctx.rng("exterior.d-squared")
    worst = 0.0
    for dim in (2, 3, 4):
        chart = unit_chart(dim)
        for degree in range(0, dim - 1):
            psi = random_pform(chart, rng, degree)
            pts = chart.interior_sample(rng, 2)
            tj = psi.jet(pts, order=2, backend=ctx.backend)
            d2_full = expand_coefficients(tj.d2, dim, degree)
            from .exterior import antisymmetrize

            dd = antisymmetrize(d2_full, degree + 2)
            worst = max(worst, float(np.max(np.abs(dd))))
    return CheckResult(worst)


@register("exterior.delta-squared",
          "delta(delta psi) = 0",
          1e-8, 1e-7)
def _delta_squared(ctx):
    rng = ctx.rng("exterior.delta-squared")
    from .exterior import codifferential_field

    worst = 0.0
    for dim in (2, 3):
        chart = unit_chart(dim)
        g = random_metric(chart, rng, deviation=0.3)
        for degree in range(2, dim + 1):
            psi = random_pform(chart, rng, degree)
            delta_psi = codifferential_field(g, psi)
            pts = chart.interior_sample(rng, 2)
            dd = codifferential(g, delta_psi, pts)
            worst = max(worst, float(np.max(np.abs(dd))))
    return CheckResult(worst)


@register("exterior.adjointness",
          "<d alpha, beta>_{L2} = <alpha, delta beta>_{L2} on a closed chart",
          1e-6, 1e-5)
def _adjointness(ctx):
    rng = ctx.rng("exterior.adjointness")
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), periodic=(True, True),
                        grid_res=(24, 24))
    g = library.periodic_random_metric(chart, rng, deviation=0.3)
    worst = 0.0
    for degree in (0, 1):
        alpha = library.periodic_random_pform(chart, rng, degree)
        beta = library.periodic_random_pform(chart, rng, degree + 1)
        pairing = l2_adjointness(g, alpha, beta, backend=ctx.backend)
        scale = 1.0 + abs(pairing.d_pairing)
        worst = max(worst, abs(pairing.d_pairing - pairing.delta_pairing) / scale)
    return CheckResult(worst)


@register("exterior.norm-law",
          "|e^{(p+1)phi} psi|_{g~} = e^{phi} |psi|_g",
          1e-10, 1e-10)
def _norm_law(ctx):
    rng = ctx.rng("exterior.norm-law")
    worst = 0.0
    for dim in (2, 3, 4):
        chart = unit_chart(dim)
        pair = random_conformal_pair(chart, rng)
        for degree in range(1, dim):
            psi = random_pform(chart, rng, degree)
            psi_t = psi.rescaled(pair.phi, float(degree + 1))
            pts = chart.interior_sample(rng, 3)
            g_inv = np.linalg.inv(pair.g.values(pts))
            gt_inv = np.linalg.inv(pair.g_tilde.values(pts))
            full = expand_coefficients(psi.jet(pts, order=0).value, dim, degree)
            full_t = expand_coefficients(psi_t.jet(pts, order=0).value, dim, degree)
            lhs = form_norm(gt_inv, full_t, degree)
            rhs = np.exp(pair.phi(pts)) * form_norm(g_inv, full, degree)
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / (1.0 + rhs))))
    return CheckResult(worst)


@register("exterior.star-twistor-exchange",
          "the Hodge star maps conformal Killing p-forms to conformal"
          " Killing (n-p)-forms (defect norms match)",
          1e-7, 1e-6)
def _star_exchange(ctx):
    rng = ctx.rng("exterior.star-twistor-exchange")
    from .exterior import star_field

    worst = 0.0
    for dim in ctx.param("dims", (2, 3)):
        chart = unit_chart(dim)
        g = random_metric(chart, rng, deviation=0.25)
        for degree in range(1, dim):
            psi = random_pform(chart, rng, degree)
            star_psi = star_field(g, psi)
            pts = chart.interior_sample(rng, 2)
            a = twistor_killing_residual(g, psi, pts, backend=ctx.backend).twistor
            b = twistor_killing_residual(g, star_psi, pts).twistor
            worst = max(worst, float(np.max(np.abs(a - b) / (1.0 + np.abs(a)))))
    return CheckResult(worst)


@register("exterior.basic-form",
          "the volume form of a parallel factor is basic with respect to it",
          1e-8, 1e-6)
def _basic_form(ctx):
    chart = ChartDomain(lo=(-1.0,) * 3, hi=(1.0,) * 3, names=("x", "t", "y"))
    g = MetricField.diagonal(chart, ["1", "1", "exp(-2*sin(t))"], name="warped")
    d1 = coordinate_block_distribution(3, [0])
    d23 = coordinate_block_distribution(3, [1, 2])
    psi = PForm.constant(chart, 1, [1.0, 0.0, 0.0], name="vol(T1)")
    rng = ctx.rng("exterior.basic-form")
    pts = chart.interior_sample(rng, 4)
    res = basic_form_residual(g, psi, d23, pts, backend=ctx.backend)
    return CheckResult(float(np.max(res)),
                       detail="vol(T1) against the complement block")


# ---------------------------------------------------------------- holonomy


@register("holonomy.flat-trivial",
          "flat metrics have trivial restricted holonomy",
          0.5, 0.5)
def _flat_trivial(ctx):
    rng = ctx.rng("holonomy.flat-trivial")
    chart = ChartDomain(lo=(0.0, 0.0), hi=(1.0, 1.0), periodic=(True, True))
    flat = MetricField.flat(chart)
    fam = default_loop_family(chart, rng=rng, samples=ctx.param("samples", 100))
    est = sample_holonomy(flat, fam, backend=ctx.backend)
    return CheckResult(float(est.algebra_dim), detail="algebra dimension")


@register("holonomy.sphere-area",
          "loop transport rotation equals the enclosed area on the unit sphere",
          1e-3, 1e-3)
def _sphere_area(ctx):
    g = sphere_metric()
    worst = 0.0
    for (theta0, phi0, s_th, s_ph) in ((1.2, 1.0, 0.4, 0.5), (0.9, 2.0, 0.3, 0.3),
                                       (1.6, 4.0, 0.25, 0.6)):
        x0 = np.array([theta0, phi0])
        loop = rectangle_loop(x0, 0, 1, s_th, s_ph)
        p = path_transport_matrix(g, loop, steps=120, backend=ctx.backend)
        e = frame_gram_schmidt(g.values(x0))
        q = np.linalg.inv(e) @ p @ e
        angle = abs(np.arctan2(q[1, 0], q[0, 0]))
        area = abs((np.cos(theta0) - np.cos(theta0 + s_th)) * s_ph)
        worst = max(worst, abs(angle - area))
    return CheckResult(worst)


@register("holonomy.metric-preserved",
          "parallel transport preserves the metric inner product",
          1e-6, 1e-6)
def _metric_preserved(ctx):
    rng = ctx.rng("holonomy.metric-preserved")
    worst = 0.0
    for g in (sphere_metric(), library.warped_block_metric()):
        fam = default_loop_family(g.chart, rng=rng, samples=ctx.param("samples", 100))
        est = sample_holonomy(g, fam, backend=ctx.backend)
        worst = max(worst, est.orthogonality_defect)
    return CheckResult(worst)


@register("holonomy.product-block",
          "product metrics transport block vectors within their blocks and"
          " classify as reducible",
          1e-6, 1e-5)
def _product_block(ctx):
    rng = ctx.rng("holonomy.product-block")
    chart = ChartDomain(lo=(-1.0,) * 4, hi=(1.0,) * 4, names=("x", "y", "z", "w"))
    rows = [
        ["1 + 0.2*sin(x + 0.3)", "0.1*x*y", "0", "0"],
        ["0.1*x*y", "1 + 0.2*cos(y)", "0", "0"],
        ["0", "0", "1 + 0.2*sin(z)*cos(w)", "0.1*z*w"],
        ["0", "0", "0.1*z*w", "1 + 0.1*w*w"],
    ]
    g = MetricField.from_expressions(chart, rows, name="product")
    x0 = np.zeros(4)
    leak = 0.0
    for s in (0.1, 0.2):
        loop = rectangle_loop(x0, 0, 1, s)
        p = path_transport_matrix(g, loop, steps=100, backend=ctx.backend)
        v = p @ np.array([1.0, 0.5, 0.0, 0.0])
        leak = max(leak, float(np.max(np.abs(v[2:]))))
        loop2 = rectangle_loop(x0, 2, 3, s)
        p2 = path_transport_matrix(g, loop2, steps=100, backend=ctx.backend)
        v2 = p2 @ np.array([0.0, 0.0, 1.0, -0.3])
        leak = max(leak, float(np.max(np.abs(v2[:2]))))
    cls = classify_holonomy(g, rng=rng, samples=ctx.param("samples", 100),
                            backend=ctx.backend)
    penalty = 0.0 if cls.label == "reducible" else 1.0
    return CheckResult(leak + penalty, detail=f"label {cls.label}")


@register("holonomy.loop-scaling",
          "the transport log around an s x s rectangle scales as s^2 R(e_i,e_j)",
          0.1, 0.1)
def _loop_scaling(ctx):
    g = sphere_metric()
    x0 = np.array([1.2, 1.0])
    e = frame_gram_schmidt(g.values(x0))
    e_inv = np.linalg.inv(e)
    import scipy.linalg

    norms = []
    for s in (0.05, 0.1, 0.2):
        loop = rectangle_loop(x0, 0, 1, s)
        p = path_transport_matrix(g, loop, steps=100, backend=ctx.backend)
        log = np.real(scipy.linalg.logm(e_inv @ p @ e))
        norms.append(np.linalg.norm(log, 2) / s**2)
    dev = max(abs(v / norms[0] - 1.0) for v in norms)
    return CheckResult(dev, detail=f"normalized log norms {np.round(norms, 4)}")


@register("holonomy.curvature-span",
          "span{R(e_i, e_j)} lower-bounds the estimated holonomy algebra",
          0.5, 0.5)
def _curvature_span(ctx):
    rng = ctx.rng("holonomy.curvature-span")
    bad = 0.0
    for g, x0 in ((sphere_metric(), np.array([1.2, 1.0])),
                  (library.warped_block_metric(), np.zeros(3))):
        span = curvature_span_dim(g, x0, backend=ctx.backend)
        fam = default_loop_family(g.chart, x0=x0, rng=rng,
                                  samples=ctx.param("samples", 100))
        est = sample_holonomy(g, fam, backend=ctx.backend)
        if span > est.algebra_dim:
            bad += 1.0
    return CheckResult(bad)


@register("holonomy.homothety",
          "homothetic metrics share their Levi-Civita connection and labels",
          0.5, 0.5)
def _homothety(ctx):
    rng = ctx.rng("holonomy.homothety")
    g = library.warped_block_metric()
    a = classify_holonomy(g, rng=np.random.default_rng(rng.integers(1 << 31)),
                          samples=ctx.param("samples", 100), backend=ctx.backend)
    g4 = g.scaled(4.0)
    b = classify_holonomy(g4, rng=np.random.default_rng(rng.integers(1 << 31)),
                          samples=ctx.param("samples", 100), backend=ctx.backend)
    return CheckResult(0.0 if a.label == b.label else 1.0,
                       detail=f"labels {a.label} / {b.label}")


# ---------------------------------------------------------------- warped


def _warped_pairs(ctx, check_id):
    rng = ctx.rng(check_id)
    count = ctx.param("specs", 6)
    return [random_triple_warped_pair(rng) for _ in range(count)]


@register("warped.conjugate",
          "e^{2phi} g is the triple warped product of (M3,g3), (M2,e^{2phi}g2),"
          " (M1,g1) with warping -phi",
          0.0, 0.0)
def _warped_conjugate(ctx):
    pairs = _warped_pairs(ctx, "warped.conjugate")
    worst = max(conjugate_identity_residual(p) for p in pairs)
    return CheckResult(worst, detail=f"{len(pairs)} random specs, exact identity")


@register("warped.parallel-residuals",
          "T1 is parallel for g and T3 is parallel for g~ = e^{2phi} g",
          1e-8, 1e-6)
def _warped_parallel(ctx):
    rng = ctx.rng("warped.parallel-residuals")
    worst = 0.0
    for pair in _warped_pairs(ctx, "warped.parallel-residuals"):
        pts = pair.chart.interior_sample(rng, 4)
        for p in pts:
            worst = max(worst, distribution_parallel_residual(
                pair.g, pair.t1, p, backend=ctx.backend))
            worst = max(worst, distribution_parallel_residual(
                pair.g_tilde, pair.t3, p, backend=ctx.backend))
    return CheckResult(worst)


@register("warped.reducible-labels",
          "both metrics of a triple warped pair have reducible holonomy",
          0.5, 0.5)
def _warped_labels(ctx):
    rng = ctx.rng("warped.reducible-labels")
    failures = 0.0
    pairs = _warped_pairs(ctx, "warped.reducible-labels")
    details = []
    for pair in pairs:
        cert = reducibility_certificate(pair, rng=rng,
                                        samples=ctx.param("samples", 100),
                                        backend=ctx.backend)
        if cert.label_g != "reducible" or cert.label_g_tilde != "reducible":
            failures += 1.0
            details.append(f"{cert.label_g}/{cert.label_g_tilde}")
    return CheckResult(failures, detail=";".join(details) or
                       f"{len(pairs)} pairs reducible/reducible")


@register("warped.recovery",
          "g2 := g23 - e^{-2phi} g3 = e^{-2phi} g12 - g1 and"
          " g = g1 + g2 + e^{-2phi} g3",
          1e-10, 1e-9)
def _warped_recovery(ctx):
    worst = 0.0
    for pair in _warped_pairs(ctx, "warped.recovery"):
        rec = recover_factors(pair.g, pair.g_tilde, pair.t1, pair.t3, pair.phi)
        worst = max(worst, rec.reconstruction_residual, rec.g2_consistency,
                    rec.g2_kernel_defect, rec.phi_crosscheck)
    return CheckResult(worst)


@register("warped.alignment",
          "dphi ^ vol(T12) = 0 and grad phi lies in T12 (M2 = M) on every"
          " constructed pair",
          1e-10, 1e-8)
def _warped_alignment(ctx):
    worst = 0.0
    for pair in _warped_pairs(ctx, "warped.alignment"):
        rec = alignment_diagnostics(pair.g, pair.phi, pair.t1, pair.t12,
                                    pair.t3, pair.chart.interior_grid(2),
                                    backend=ctx.backend)
        worst = max(worst, rec.wedge_m2, rec.m2_defect, rec.c2_defect,
                    rec.cover_defect)
    return CheckResult(worst)


@register("warped.perturbation-detect",
          "a generic non-product perturbation breaks the reducibility"
          " certificate",
          0.5, 0.5)
def _warped_perturb(ctx):
    rng = ctx.rng("warped.perturbation-detect")
    chart = ChartDomain(lo=(-1.0,) * 4, hi=(1.0,) * 4, names=("x", "t", "u", "v"))
    rows = [
        ["1", "0", "0", "0"],
        ["0", "1", "0", "0"],
        ["0", "0", "exp(-2*sin(t))", "0.1*x"],
        ["0", "0", "0.1*x", "exp(-2*sin(t))"],
    ]
    g = MetricField.from_expressions(chart, rows, name="perturbed")
    d1 = coordinate_block_distribution(4, [0])
    res = max(distribution_parallel_residual(g, d1, p, backend=ctx.backend)
              for p in chart.interior_sample(rng, 4))
    if res > 1e-3:
        return CheckResult(0.0, detail=f"parallel residual {res:.3e} flags it")
    cls = classify_holonomy(g, rng=rng, samples=ctx.param("samples", 100),
                            backend=ctx.backend)
    return CheckResult(0.0 if cls.label != "reducible" else 1.0,
                       detail=f"label {cls.label}")
