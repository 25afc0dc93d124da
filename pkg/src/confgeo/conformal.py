"""Conformal rescaling g~ = e^{2 phi} g and residual checks of the
rescaling identities: the connection law, the trace-free Ricci law, the
scalar-curvature law, the Einstein-pair display, and conformal vector
fields.  Includes the inversion-type Einstein pair family on flat charts
(e^{-phi} = |x|^2 + c), whose rescaled metric is round up to scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import jets
from .chart import ChartDomain
from .curvature import (
    MetricField,
    _gamma_from_jet,
    curvature_pack,
    grad_laplace,
    lie_derivative_metric,
    metric_opnorm,
    sym2_residual_norm,
)
from .errors import DomainMismatchError
from .fields import ScalarField, VectorField
from .holonomy import verify_parallel_field


@dataclass
class ConformalPair:
    """(g, phi, g~ = e^{2 phi} g); g~ is derived componentwise, never supplied."""

    g: MetricField
    phi: ScalarField
    g_tilde: MetricField

    @property
    def chart(self) -> ChartDomain:
        return self.g.chart


def rescale(g: MetricField, phi: ScalarField) -> ConformalPair:
    """Build the conformal pair; g~ entries are exp(2 phi) * g entries."""
    if phi.chart.dim != g.chart.dim or tuple(phi.chart.lo) != tuple(g.chart.lo) \
            or tuple(phi.chart.hi) != tuple(g.chart.hi):
        raise DomainMismatchError("phi and g live on different charts")

    def matrix(coords):
        scale = jets.exp(2.0 * phi.fn(coords))
        rows = g.matrix_fn(coords)
        return [[scale * entry for entry in row] for row in rows]

    g_tilde = MetricField(g.chart, matrix, g.orientation,
                          name=f"exp(2 phi)*({g.name})")
    return ConformalPair(g, phi, g_tilde)


def mobius_einstein_pair(chart: ChartDomain, c: float = 1.0) -> ConformalPair:
    """Flat g with e^{-phi} = |x|^2 + c; g~ is Einstein (round up to scale)."""
    g = MetricField.flat(chart)
    phi = ScalarField.from_expression(chart, f"-log(norm2() + {c})")
    return rescale(g, phi)


def connection_law_residual(pair: ConformalPair, x, backend=None) -> float:
    """Max component gap between the Christoffels of g~ and the displayed law."""
    g, phi = pair.g, pair.phi
    gj = g.jet(x, order=1, backend=backend)
    g_inv, _, gamma = _gamma_from_jet(gj.value, gj.d1)
    pj = phi.jet(x, order=1, backend=backend)
    grad = np.einsum("...ij,...j->...i", g_inv, pj.d1)
    n = g.chart.dim
    eye = np.eye(n)
    rhs = (
        gamma
        + np.einsum("...i,kj->...kij", pj.d1, eye)
        + np.einsum("...j,ki->...kij", pj.d1, eye)
        - np.einsum("...ij,...k->...kij", gj.value, grad)
    )
    gj_t = pair.g_tilde.jet(x, order=1, backend=backend)
    _, _, gamma_t = _gamma_from_jet(gj_t.value, gj_t.d1)
    return float(np.max(np.abs(gamma_t - rhs)) / (1.0 + np.max(np.abs(rhs))))


def trace_free_ricci_residual(pair: ConformalPair, x, backend=None) -> float:
    """Residual of the trace-free Ricci rescaling law at x."""
    g, phi = pair.g, pair.phi
    n = g.chart.dim
    cb = curvature_pack(g, x, backend=backend)
    gl = grad_laplace(g, phi, x, backend=backend)
    dphi = gl.dphi
    rhs = (
        cb.ric0
        - (n - 2) * (gl.hessian - dphi[..., :, None] * dphi[..., None, :])
        - ((n - 2) / n) * (gl.laplace + gl.dphi_norm2)[..., None, None] * cb.g
    )
    cb_t = curvature_pack(pair.g_tilde, x, backend=backend)
    return float(np.max(sym2_residual_norm(cb_t.ric0 - rhs, cb.g)))


class ScalarLawResiduals(NamedTuple):
    r1: float  # scalar-curvature rescaling law
    r2: float | None  # combined display (needs a parallel-field certificate)
    parallel_identity: float | None  # | Scal + (n-2)(lap + |dphi|^2) |
    hypothesis_defect: float | None  # certificate checks on the supplied field


def scalar_law_residual(pair: ConformalPair, x, xi0: VectorField | None = None,
                        backend=None, parallel_tol=1e-6) -> ScalarLawResiduals:
    """Scalar-curvature law residual r1; with a claimed g-parallel unit field
    xi0 also the combined-display residual r2 and its hypothesis checks."""
    g, phi = pair.g, pair.phi
    n = g.chart.dim
    cb = curvature_pack(g, x, backend=backend)
    cb_t = curvature_pack(pair.g_tilde, x, backend=backend)
    gl = grad_laplace(g, phi, x, backend=backend)
    pj_val = phi(x)
    lhs = np.exp(2.0 * pj_val) * cb_t.scal
    rhs = cb.scal + 2 * (n - 1) * gl.laplace - (n - 2) * (n - 1) * gl.dphi_norm2
    r1 = float(np.max(np.abs(lhs - rhs)))
    if xi0 is None:
        return ScalarLawResiduals(r1, None, None, None)

    x_arr = np.asarray(x, dtype=float)
    base = x_arr if x_arr.ndim == 1 else x_arr.reshape(-1, n)[0]
    verify_parallel_field(g, xi0, base, tol=parallel_tol, backend=backend)
    xi_vals = xi0(x)
    # certificate: d phi(xi) = 0, nabla_xi d phi = 0, Ric(xi) = 0
    dphi_xi = np.einsum("...i,...i->...", gl.dphi, xi_vals)
    nabla_xi_dphi = np.einsum("...ij,...i->...j", gl.hessian, xi_vals)
    ric_xi = np.einsum("...ij,...i->...j", cb.ricci, xi_vals)
    hyp = float(max(np.max(np.abs(dphi_xi)), np.max(np.abs(nabla_xi_dphi)),
                    np.max(np.abs(ric_xi))))
    r2 = float(np.max(np.abs(lhs - n * (gl.laplace - (n - 2) * gl.dphi_norm2))))
    parallel_identity = float(np.max(np.abs(
        cb.scal + (n - 2) * (gl.laplace + gl.dphi_norm2))))
    return ScalarLawResiduals(r1, r2, parallel_identity, hyp)


class EinsteinPairDiagnostics(NamedTuple):
    ric0_g: float
    ric0_g_tilde: float
    f_value: np.ndarray
    ng_residual: float


def einstein_pair_diagnostics(pair: ConformalPair, x, backend=None) -> EinsteinPairDiagnostics:
    """Einstein-ness of both metrics and the residual of the displayed
    identity nabla(e^{-phi} d phi) = (e^{-phi} f) g with
    f = -(1/n)(lap phi + |d phi|^2)."""
    g, phi = pair.g, pair.phi
    n = g.chart.dim
    cb = curvature_pack(g, x, backend=backend)
    cb_t = curvature_pack(pair.g_tilde, x, backend=backend)
    gl = grad_laplace(g, phi, x, backend=backend)
    phi_val = phi(x)
    f_val = -(gl.laplace + gl.dphi_norm2) / n
    em_phi = np.exp(-phi_val)
    nabla_alpha = em_phi[..., None, None] * (
        gl.hessian - gl.dphi[..., :, None] * gl.dphi[..., None, :]
    )
    defect = nabla_alpha - (em_phi * f_val)[..., None, None] * cb.g
    return EinsteinPairDiagnostics(
        float(np.max(metric_opnorm(cb.ric0, cb.g))),
        float(np.max(metric_opnorm(cb_t.ric0, cb_t.g))),
        f_val,
        float(np.max(metric_opnorm(defect, cb.g))),
    )


class ConformalVectorResiduals(NamedTuple):
    conformal: float
    killing: float


def conformal_vector_residual(g: MetricField, xi: VectorField, x,
                              backend=None) -> ConformalVectorResiduals:
    """Trace-free and full Lie-derivative norms; the conformal part is
    measured in the metric operator norm, which makes it exactly invariant
    under conformal rescalings of g."""
    lie = lie_derivative_metric(g, xi, x, backend=backend)
    g_val = g.values(x)
    n = g.chart.dim
    g_inv = np.linalg.inv(g_val)
    trace = np.einsum("...ij,...ij->...", g_inv, lie)
    lie0 = lie - (trace[..., None, None] / n) * g_val
    return ConformalVectorResiduals(
        float(np.max(metric_opnorm(lie0, g_val))),
        float(np.max(metric_opnorm(lie, g_val))),
    )


