"""Levi-Civita connection, curvature tensors, and metric-level helpers.

Conventions, fixed once and validated by the round-sphere golden values:

* curvature  R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
  lowered as R_ijkl = g(R(d_i, d_j) d_k, d_l); the unit round 2-sphere then
  has scalar curvature +2;
* Laplacian  lap(f) = -tr_g(nabla df)  (the sign under which the verified
  rescaling identities hold as displayed; note most numerics libraries use
  the opposite sign).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import jets
from .chart import ChartDomain
from .errors import NotSPDError
from .expressions import compile_expression
from .fields import ScalarField, VectorField


@dataclass
class MetricField:
    """Metric components g_ij as a smooth matrix field on a chart."""

    chart: ChartDomain
    matrix_fn: Callable  # coords -> nested n x n list of Jet/array entries
    orientation: int = 1
    name: str = ""

    @classmethod
    def flat(cls, chart):
        n = chart.dim
        eye = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
        return cls(chart, lambda coords: eye, name="flat")

    @classmethod
    def from_expressions(cls, chart, rows, name=""):
        compiled = [[compile_expression(e, chart.names) for e in row] for row in rows]

        def matrix(coords):
            return [[entry(coords) for entry in row] for row in compiled]

        return cls(chart, matrix, name=name or "expr")

    @classmethod
    def diagonal(cls, chart, entries, name=""):
        compiled = [compile_expression(e, chart.names) if isinstance(e, str) else e
                    for e in entries]
        n = chart.dim

        def matrix(coords):
            rows = []
            for i in range(n):
                row = []
                for j in range(n):
                    if i != j:
                        row.append(0.0)
                    elif callable(compiled[i]):
                        row.append(compiled[i](coords))
                    else:
                        row.append(compiled[i])
                rows.append(row)
            return rows

        return cls(chart, matrix, name=name or "diag")

    @classmethod
    def from_entry_functions(cls, chart, entry_fns, name=""):
        def matrix(coords):
            return [[fn(coords) for fn in row] for row in entry_fns]

        return cls(chart, matrix, name=name)

    def scaled(self, constant):
        c = float(constant)

        def matrix(coords):
            rows = self.matrix_fn(coords)
            return [[c * entry for entry in row] for row in rows]

        return MetricField(self.chart, matrix, self.orientation,
                           name=f"{c}*({self.name})")

    def values(self, x):
        tj = self.jet(x, order=0)
        return tj.value

    def jet(self, x, order=1, backend=None):
        x = self.chart.check_inside(x)
        return jets.eval_tensor_jet(self.matrix_fn, x, order, h=self.chart.fd_h,
                                    wrap=self.chart.wrap, backend_name=backend)

    def require_spd(self, g_values):
        try:
            np.linalg.cholesky(g_values)
        except np.linalg.LinAlgError as exc:
            raise NotSPDError("metric is not positive definite at a sampled point") from exc


@dataclass
class ConnectionCoefficients:
    """Christoffel symbols; gamma[..., k, i, j] holds the (i,j) -> k symbol."""

    gamma: np.ndarray


@dataclass
class CurvatureBundle:
    """Curvature data at the evaluation points (batched over leading axes)."""

    g: np.ndarray
    g_inv: np.ndarray
    gamma: np.ndarray
    riemann: np.ndarray  # lowered R_ijkl
    ricci: np.ndarray
    scal: np.ndarray
    ric0: np.ndarray


class GradLaplace(NamedTuple):
    grad: np.ndarray
    dphi_norm2: np.ndarray
    laplace: np.ndarray
    hessian: np.ndarray  # covariant Hessian (nabla d phi)
    dphi: np.ndarray


def _gamma_from_jet(g_value, g_d1):
    g_inv = np.linalg.inv(g_value)
    t1 = np.einsum("...ijl->...lij", g_d1)
    t2 = np.einsum("...jil->...lij", g_d1)
    gamma_low = 0.5 * (t1 + t2 - g_d1)
    gamma = np.einsum("...kl,...lij->...kij", g_inv, gamma_low)
    return g_inv, gamma_low, gamma


def christoffel(g: MetricField, x, backend=None) -> ConnectionCoefficients:
    """Christoffel symbols of g at x (batched)."""
    tj = g.jet(x, order=1, backend=backend)
    g.require_spd(tj.value)
    _, _, gamma = _gamma_from_jet(tj.value, tj.d1)
    return ConnectionCoefficients(gamma)


def curvature_pack(g: MetricField, x, backend=None) -> CurvatureBundle:
    """Riemann, Ricci, scalar, and trace-free Ricci of g at x (batched)."""
    tj = g.jet(x, order=2, backend=backend)
    g.require_spd(tj.value)
    n = g.chart.dim
    g_val, d_g, d2_g = tj.value, tj.d1, tj.d2
    g_inv, gamma_low, gamma = _gamma_from_jet(g_val, d_g)

    u1 = np.einsum("...mijl->...mlij", d2_g)
    u2 = np.einsum("...mjil->...mlij", d2_g)
    d_gamma_low = 0.5 * (u1 + u2 - d2_g)
    d_g_inv = -np.einsum("...ka,...mab,...bl->...mkl", g_inv, d_g, g_inv)
    d_gamma = np.einsum("...mkl,...lij->...mkij", d_g_inv, gamma_low) + np.einsum(
        "...kl,...mlij->...mkij", g_inv, d_gamma_low
    )

    term1 = np.einsum("...iljk->...lijk", d_gamma)
    term2 = np.einsum("...jlik->...lijk", d_gamma)
    term3 = np.einsum("...lim,...mjk->...lijk", gamma, gamma)
    term4 = np.einsum("...ljm,...mik->...lijk", gamma, gamma)
    riemann_up = term1 - term2 + term3 - term4

    riemann = np.einsum("...lm,...mijk->...ijkl", g_val, riemann_up)
    ricci = np.einsum("...iijk->...jk", riemann_up)
    scal = np.einsum("...jk,...jk->...", g_inv, ricci)
    ric0 = ricci - (scal[..., None, None] / n) * g_val
    return CurvatureBundle(g_val, g_inv, gamma, riemann, ricci, scal, ric0)


def grad_laplace(g: MetricField, phi: ScalarField, x, backend=None) -> GradLaplace:
    """Gradient, squared differential norm, and (positive) Laplacian of phi."""
    gj = g.jet(x, order=1, backend=backend)
    g.require_spd(gj.value)
    g_inv, _, gamma = _gamma_from_jet(gj.value, gj.d1)
    pj = phi.jet(x, order=2, backend=backend)
    hess = pj.d2 - np.einsum("...kij,...k->...ij", gamma, pj.d1)
    grad = np.einsum("...ij,...j->...i", g_inv, pj.d1)
    norm2 = np.einsum("...i,...ij,...j->...", pj.d1, g_inv, pj.d1)
    laplace = -np.einsum("...ij,...ij->...", g_inv, hess)
    return GradLaplace(grad, norm2, laplace, hess, pj.d1)


def covariant_hessian(g: MetricField, phi: ScalarField, x, backend=None):
    return grad_laplace(g, phi, x, backend=backend).hessian


def volume_density(g: MetricField, x):
    """Positive density sqrt(det g) with the metric's orientation sign."""
    vals = g.values(x)
    g.require_spd(vals)
    return g.orientation * np.sqrt(np.linalg.det(vals))


def volume_density_field(g: MetricField) -> ScalarField:
    """sqrt(det g) packaged as a ScalarField for quadrature (plain values)."""

    def fn(coords):
        mats = jets._stack_values(g.matrix_fn(coords), np.shape(coords[0]))
        return np.sqrt(np.linalg.det(mats))

    return ScalarField(g.chart, fn, name=f"sqrt(det {g.name})")


def lie_derivative_metric(g: MetricField, xi: VectorField, x, backend=None):
    """(L_xi g)_ij from the coordinate formula."""
    gj = g.jet(x, order=1, backend=backend)
    vj = xi.jet(x, order=1, backend=backend)
    # vj: value (...,a) components, d1 (...,i,a) = d_i xi^a
    term1 = np.einsum("...k,...kij->...ij", vj.value, gj.d1)
    term2 = np.einsum("...kj,...ik->...ij", gj.value, vj.d1)
    term3 = np.einsum("...ik,...jk->...ij", gj.value, vj.d1)
    return term1 + term2 + term3


def matrix_opnorm(a):
    """Spectral norm of batched matrices."""
    return np.linalg.svd(a, compute_uv=False)[..., 0]


def sym2_residual_norm(defect, g_value):
    """Operator norm of a symmetric-2-tensor defect, normalized by 1 + |g|."""
    return matrix_opnorm(defect) / (1.0 + matrix_opnorm(g_value))


def metric_opnorm(defect, g_value):
    """Largest |eigenvalue| of g^{-1} defect; invariant under rescaling g."""
    chol = np.linalg.cholesky(g_value)
    inv_l = np.linalg.inv(chol)
    m = inv_l @ defect @ np.swapaxes(inv_l, -1, -2)
    eig = np.linalg.eigvalsh(0.5 * (m + np.swapaxes(m, -1, -2)))
    return np.max(np.abs(eig), axis=-1)
