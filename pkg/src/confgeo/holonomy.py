"""Parallel transport, holonomy-algebra estimation, invariant distributions,
and the coarse holonomy classification used by the verification harness.

Transport integrates the linear system v' = -Gamma(x(t)) x'(t) v for the
full matrix of basis solutions with RK4 and Richardson step-doubling; the
connection samples along a path are evaluated in one batched sweep, so the
per-step work reduces to small matrix products (the numba kernel path).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from . import kernels
from .chart import frame_gram_schmidt
from .curvature import MetricField, _gamma_from_jet
from .errors import (
    CommutantDegenerateError,
    LogBranchFailureError,
    NotParallelError,
    OutOfDomainError,
    PathEscapesChartError,
    StepSizeUnderflowError,
)
from .fields import VectorField

# -- paths ---------------------------------------------------------------


@dataclass
class Segment:
    """A smooth curve piece over t in [0, 1] with vectorized evaluators."""

    point: Callable
    velocity: Callable


@dataclass
class Path:
    segments: list

    @property
    def start(self):
        return self.segments[0].point(np.zeros(1))[0]

    @property
    def end(self):
        return self.segments[-1].point(np.ones(1))[0]

    def scaled_about(self, center, factor):
        center = np.asarray(center, dtype=float)
        segs = []
        for seg in self.segments:
            segs.append(Segment(
                point=lambda t, s=seg: center + factor * (s.point(t) - center),
                velocity=lambda t, s=seg: factor * s.velocity(t),
            ))
        return Path(segs)


def line_segment(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return Segment(
        point=lambda t: a + np.asarray(t)[..., None] * (b - a),
        velocity=lambda t: np.broadcast_to(b - a, np.shape(t) + a.shape).copy(),
    )


def polyline_path(points):
    return Path([line_segment(points[k], points[k + 1]) for k in range(len(points) - 1)])


def rectangle_loop(x0, axis_i, axis_j, size_i, size_j=None):
    """Coordinate rectangle based at x0 in the (i, j) plane."""
    x0 = np.asarray(x0, dtype=float)
    size_j = size_i if size_j is None else size_j
    e_i = np.zeros_like(x0)
    e_i[axis_i] = size_i
    e_j = np.zeros_like(x0)
    e_j[axis_j] = size_j
    corners = [x0, x0 + e_i, x0 + e_i + e_j, x0 + e_j, x0]
    return polyline_path(corners)


def fourier_loop(x0, rng, radius, modes=2):
    """Random smooth closed curve through x0 (closed by construction)."""
    x0 = np.asarray(x0, dtype=float)
    n = x0.shape[0]
    a = rng.normal(size=(modes, n)) * radius / modes
    b = rng.normal(size=(modes, n)) * radius / modes

    def point(t):
        t = np.asarray(t, dtype=float)
        out = np.broadcast_to(x0, np.shape(t) + (n,)).copy()
        for k in range(modes):
            w = 2.0 * np.pi * (k + 1)
            out = out + a[k] * (np.cos(w * t)[..., None] - 1.0) + b[k] * np.sin(w * t)[..., None]
        return out

    def velocity(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(np.shape(t) + (n,))
        for k in range(modes):
            w = 2.0 * np.pi * (k + 1)
            out = out + a[k] * (-w * np.sin(w * t))[..., None] + b[k] * (w * np.cos(w * t))[..., None]
        return out

    return Path([Segment(point, velocity)])


@dataclass
class LoopFamily:
    """Loops based at one point, used to sample the holonomy group."""

    basepoint: np.ndarray
    loops: list
    samples: int = 200

    def __post_init__(self):
        x0 = np.asarray(self.basepoint, dtype=float)
        for loop in self.loops:
            if np.max(np.abs(loop.start - x0)) > 1e-9 or np.max(np.abs(loop.end - x0)) > 1e-9:
                raise ValueError("every loop must start and end at the basepoint")


def default_loop_family(chart, x0=None, rng=None, samples=200,
                        rect_sizes=(0.05, 0.1, 0.2), min_loops=20):
    """Rectangles in random coordinate planes plus smooth random loops."""
    rng = rng or np.random.default_rng(0)
    n = chart.dim
    if x0 is None:
        x0 = 0.5 * (np.asarray(chart.lo) + np.asarray(chart.hi))
    x0 = np.asarray(x0, dtype=float)
    max_size = max(rect_sizes)
    _require_room(chart, x0, max_size)
    loops = []
    for i in range(n):
        for j in range(i + 1, n):
            for s in rect_sizes:
                loops.append(rectangle_loop(x0, i, j, s))
    while len(loops) < min_loops:
        loops.append(fourier_loop(x0, rng, radius=0.5 * max_size))
    return LoopFamily(x0, loops, samples)


def _require_room(chart, x0, size):
    lo = np.asarray(chart.lo)
    hi = np.asarray(chart.hi)
    for i in range(chart.dim):
        if chart.periodic[i]:
            continue
        if x0[i] - 1.5 * size < lo[i] or x0[i] + 1.5 * size > hi[i]:
            raise PathEscapesChartError(
                f"loop family of size {size} does not fit around the basepoint")


# -- transport -----------------------------------------------------------


def _segment_coefficient(g: MetricField, seg: Segment, steps, backend=None):
    """A(t) = -Gamma(x(t)) x'(t) sampled at the 2*steps+1 RK4 nodes."""
    ts = np.linspace(0.0, 1.0, 2 * steps + 1)
    xs = seg.point(ts)
    try:
        g.chart.check_inside(xs, slack=1e-9)
    except OutOfDomainError as exc:
        raise PathEscapesChartError(str(exc)) from exc
    vel = seg.velocity(ts)
    gj = g.jet(xs, order=1, backend=backend)
    _, _, gamma = _gamma_from_jet(gj.value, gj.d1)
    return -np.einsum("...kij,...i->...kj", gamma, vel)


def _segment_transport(g, seg, steps, tol, max_doublings, backend=None):
    m = steps
    a_fine = _segment_coefficient(g, seg, 2 * m, backend=backend)
    p_coarse = kernels.rk4_transport(np.ascontiguousarray(a_fine[::2]), 1.0 / m)
    for _ in range(max_doublings):
        p_fine = kernels.rk4_transport(a_fine, 1.0 / (2 * m))
        err = np.max(np.abs(p_fine - p_coarse)) / 15.0
        if err <= tol:
            return p_fine
        m *= 2
        a_fine = _segment_coefficient(g, seg, 2 * m, backend=backend)
        p_coarse = p_fine
    raise StepSizeUnderflowError(
        f"transport did not reach tolerance {tol} within {max_doublings} refinements")


def path_transport_matrix(g: MetricField, path: Path, steps=64, tol=1e-11,
                          max_doublings=4, backend=None):
    """Matrix mapping coordinate components at path start to path end."""
    n = g.chart.dim
    p = np.eye(n)
    for seg in path.segments:
        p = _segment_transport(g, seg, steps, tol, max_doublings, backend=backend) @ p
    return p


def parallel_transport(g: MetricField, path: Path, v0, steps=200, tol=1e-11,
                       backend=None):
    """Transport the vector v0 along the path; conserves the g-norm."""
    p = path_transport_matrix(g, path, steps=steps, tol=tol, backend=backend)
    return p @ np.asarray(v0, dtype=float)


def metric_preservation_defect(g, path, transport):
    g0 = g.values(path.start)
    g1 = g.values(path.end)
    return float(np.max(np.abs(transport.T @ g1 @ transport - g0)))


# -- holonomy estimation ---------------------------------------------------


@dataclass
class HolonomyEstimate:
    basepoint: np.ndarray
    frame: np.ndarray  # columns are a g-orthonormal frame at the basepoint
    generators: list  # orthonormal (Frobenius) basis of the estimated algebra
    algebra_dim: int
    orthogonality_defect: float
    transports: list = field(default_factory=list)  # frame-coordinate transports
    raw_logs: list = field(default_factory=list)


_SV_CUTOFF = 1e-5
_SV_FLOOR = 1e-9


def _span_basis(mats, n):
    """Orthonormal basis of the span of matrices, with the rank cutoff."""
    if not mats:
        return []
    stack = np.stack([m.reshape(-1) for m in mats])
    u, s, vt = np.linalg.svd(stack, full_matrices=False)
    if s.size == 0:
        return []
    keep = s > max(_SV_CUTOFF * s[0], _SV_FLOOR)
    return [vt[i].reshape(n, n) for i in range(len(s)) if keep[i]]


def _close_under_commutators(basis, n, max_rounds=8):
    current = list(basis)
    for _ in range(max_rounds):
        if not current:
            return current
        cand = list(current)
        for i in range(len(current)):
            for j in range(i + 1, len(current)):
                cand.append(current[i] @ current[j] - current[j] @ current[i])
        new = _span_basis(cand, n)
        if len(new) == len(current):
            return new
        current = new
    return current


def sample_holonomy(g: MetricField, loops: LoopFamily, backend=None) -> HolonomyEstimate:
    """Estimate the restricted holonomy algebra from loop transports."""
    if len(loops.loops) < 20:
        raise ValueError("holonomy sampling needs at least 20 loops")
    x0 = np.asarray(loops.basepoint, dtype=float)
    g0 = g.values(x0)
    frame = frame_gram_schmidt(g0)
    frame_inv = np.linalg.inv(frame)
    n = g.chart.dim

    logs = []
    transports = []
    defect = 0.0
    for loop in loops.loops:
        q, log = _loop_log(g, loop, x0, frame, frame_inv, loops.samples, backend)
        transports.append(q)
        logs.append(log)
        defect = max(defect, float(np.max(np.abs(q.T @ q - np.eye(n)))))

    basis = _span_basis(logs, n)
    basis = _close_under_commutators(basis, n)
    return HolonomyEstimate(
        basepoint=x0,
        frame=frame,
        generators=basis,
        algebra_dim=len(basis),
        orthogonality_defect=defect,
        transports=transports,
        raw_logs=logs,
    )


def _loop_log(g, loop, x0, frame, frame_inv, samples, backend, _retry=True):
    p = path_transport_matrix(g, loop, steps=samples, backend=backend)
    q = frame_inv @ p @ frame
    log = scipy.linalg.logm(q)
    angle = np.linalg.norm(log, 2)
    if angle >= np.pi - 0.3 or np.max(np.abs(np.imag(log))) > 1e-6:
        if _retry:
            return _loop_log(g, loop.scaled_about(x0, 0.5), x0, frame, frame_inv,
                             samples, backend, _retry=False)
        raise LogBranchFailureError(
            "loop transport too far from the identity for a principal log")
    log = np.real(log)
    return q, 0.5 * (log - log.T)


def curvature_span_dim(g: MetricField, x0, backend=None):
    """dim span{R(e_i, e_j)} in an orthonormal frame (algebra lower bound)."""
    from .curvature import curvature_pack

    cb = curvature_pack(g, np.asarray(x0, dtype=float), backend=backend)
    frame = frame_gram_schmidt(cb.g)
    n = g.chart.dim
    # R(e_i,e_j) as matrices acting on the frame: entries <R(e_i,e_j)e_k, e_l>
    r_frame = np.einsum("ijkl,ia,jb,kc,ld->abcd", cb.riemann, frame, frame, frame, frame)
    mats = [r_frame[i, j] for i in range(n) for j in range(i + 1, n)]
    return len(_span_basis(mats, n))


# -- distributions ---------------------------------------------------------


@dataclass
class Distribution:
    """A field of tangent subspaces given by a g-orthogonal projector field."""

    rank: int
    projector: Callable  # x -> (..., n, n)
    constant: bool = False

    def projector_d1(self, x, h):
        """d_k P (finite differences unless the projector is constant)."""
        x = np.asarray(x, dtype=float)
        n = x.shape[-1]
        if self.constant:
            p = np.asarray(self.projector(x))
            return np.zeros(x.shape[:-1] + (n,) + p.shape[-2:])
        from .jets import fd_eval

        def values(coords):
            pts = np.stack(coords, axis=-1)
            return np.asarray(self.projector(pts), dtype=float)

        _, d1, _, _ = fd_eval(values, x, 1, h)
        return d1


def constant_distribution(projector_matrix, rank):
    mat = np.asarray(projector_matrix, dtype=float)

    def projector(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(mat, x.shape[:-1] + mat.shape).copy()

    return Distribution(rank=rank, projector=projector, constant=True)


def coordinate_block_distribution(n, axes, g: MetricField | None = None):
    """Projector onto a set of coordinate axes (g-orthogonal for block metrics)."""
    mat = np.zeros((n, n))
    for a in axes:
        mat[a, a] = 1.0
    return constant_distribution(mat, len(axes))


def transported_distribution(g: MetricField, x0, projector0, rank, steps=24,
                             backend=None):
    """Extend a projector at x0 over the chart by transport along axis rays."""
    x0 = np.asarray(x0, dtype=float)
    p0 = np.asarray(projector0, dtype=float)
    cache = {}

    def single(x):
        key = np.round(x, 12).tobytes()
        if key not in cache:
            corners = [x0]
            cur = x0.copy()
            for i in range(len(x0)):
                cur = cur.copy()
                cur[i] = x[i]
                corners.append(cur.copy())
            path = polyline_path(corners)
            t = path_transport_matrix(g, path, steps=steps, backend=backend)
            cache[key] = t @ p0 @ np.linalg.inv(t)
        return cache[key]

    def projector(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return single(x)
        flat = x.reshape(-1, x.shape[-1])
        return np.stack([single(p) for p in flat]).reshape(x.shape[:-1] + p0.shape)

    return Distribution(rank=rank, projector=projector, constant=False)


def distribution_parallel_residual(g: MetricField, dist: Distribution, x,
                                   backend=None):
    """Max component of nabla P at x, P viewed as a (1,1)-tensor field."""
    x = np.asarray(x, dtype=float)
    gj = g.jet(x, order=1, backend=backend)
    _, _, gamma = _gamma_from_jet(gj.value, gj.d1)
    p = np.asarray(dist.projector(x), dtype=float)
    dp = dist.projector_d1(x, g.chart.fd_h)
    nabla = (
        dp
        + np.einsum("...ikm,...mj->...kij", gamma, p)
        - np.einsum("...mkj,...im->...kij", gamma, p)
    )
    return float(np.max(np.abs(nabla)))


# -- invariant subspaces and classification --------------------------------


def _commutant_basis(generators, n):
    """Orthonormal basis of {X : XA = AX for all generators A}."""
    rows = []
    for a in generators:
        # row-major vec: vec(AX - XA) = (A (x) I - I (x) A^T) vec(X)
        rows.append(np.kron(a, np.eye(n)) - np.kron(np.eye(n), a.T))
    m = np.vstack(rows)
    _, s, vt = np.linalg.svd(m)
    tol = max(1e-8, 1e-8 * s[0])
    return [vt[i].reshape(n, n) for i in range(len(s)) if s[i] <= tol]


def invariant_subspaces(est: HolonomyEstimate, g: MetricField, rng=None,
                        invariance_tol=1e-5, tries=5):
    """Transport-invariant distributions from the commutant of the generators.

    Works in the orthonormal frame at the basepoint; the returned projectors
    are expressed in chart coordinates and extended over the chart by
    transport along axis-parallel rays.
    """
    rng = rng or np.random.default_rng(0)
    n = est.frame.shape[-1]
    if est.algebra_dim == 0:
        return [
            transported_distribution(g, est.basepoint,
                                     _frame_line_projector(est.frame, a), 1)
            for a in range(n)
        ]
    commutant = _commutant_basis(est.generators, n)
    if len(commutant) <= 1:
        return []
    sym_parts = _span_basis([0.5 * (c + c.T) for c in commutant], n)
    if len(sym_parts) <= 1:
        return []  # only multiples of the identity: irreducible
    for _ in range(tries):
        s = sum(rng.normal() * c for c in commutant)
        s = 0.5 * (s + s.T)
        eigval, eigvec = np.linalg.eigh(s)
        clusters = _cluster_eigenvalues(eigval)
        if len(clusters) < 2:
            continue
        dists = []
        ok = True
        for idx in clusters:
            v = eigvec[:, idx]
            p_frame = v @ v.T
            if any(np.max(np.abs((np.eye(n) - p_frame) @ a @ p_frame)) > invariance_tol
                   for a in est.generators):
                ok = False
                break
            p_coord = est.frame @ p_frame @ np.linalg.inv(est.frame)
            dists.append(transported_distribution(g, est.basepoint, p_coord,
                                                  len(idx)))
        if ok and dists:
            return dists
    raise CommutantDegenerateError(
        "random commutant elements kept producing clustered eigenvalues")


def _frame_line_projector(frame, a):
    u = frame[:, a][:, None]
    frame_inv = np.linalg.inv(frame)
    return (frame @ _unit_proj(frame.shape[-1], a)) @ frame_inv


def _unit_proj(n, a):
    p = np.zeros((n, n))
    p[a, a] = 1.0
    return p


def _cluster_eigenvalues(eigval, rel_gap=1e-3):
    spread = max(eigval[-1] - eigval[0], 1e-12)
    clusters = [[0]]
    for i in range(1, len(eigval)):
        if eigval[i] - eigval[i - 1] > rel_gap * spread:
            clusters.append([])
        clusters[-1].append(i)
    return clusters


def complex_structure_search(est: HolonomyEstimate, rng=None, tol=1e-6):
    """Look for J in the commutant with J^2 = -I (frame coordinates)."""
    rng = rng or np.random.default_rng(0)
    n = est.frame.shape[-1]
    if n % 2 == 1:
        return None
    commutant = _commutant_basis(est.generators, n)
    skews = _span_basis([0.5 * (c - c.T) for c in commutant], n)
    if not skews:
        return None
    for _ in range(5):
        k = sum(rng.normal() * s for s in skews)
        k = 0.5 * (k - k.T)
        m = -k @ k
        eigval, eigvec = np.linalg.eigh(m)
        if eigval[0] <= 1e-10 * max(eigval[-1], 1.0):
            continue
        m_inv_sqrt = eigvec @ np.diag(1.0 / np.sqrt(eigval)) @ eigvec.T
        j = k @ m_inv_sqrt
        if np.max(np.abs(j @ j + np.eye(n))) > tol:
            continue
        if any(np.max(np.abs(j @ a - a @ j)) > 1e-4 for a in est.generators):
            continue
        return j
    return None


@dataclass
class HolonomyClassification:
    label: str  # trivial | reducible | unitary | generic | undetermined
    estimate: HolonomyEstimate
    invariant_distributions: list
    complex_structure: np.ndarray | None = None
    note: str = ""


def classify_holonomy(g: MetricField, x0=None, rng=None, loops=None,
                      samples=200, backend=None) -> HolonomyClassification:
    """Best-effort holonomy label from loop sampling.

    The unitary label does not test local symmetry, so it covers more than
    strict Kaehler-type holonomy; full-dimension algebras win over any
    accidental complex structure (relevant for n = 2).
    """
    rng = rng or np.random.default_rng(0)
    if loops is None:
        loops = default_loop_family(g.chart, x0=x0, rng=rng, samples=samples)
    est = sample_holonomy(g, loops, backend=backend)
    n = g.chart.dim
    full_dim = n * (n - 1) // 2
    if est.algebra_dim == 0:
        dists = invariant_subspaces(est, g, rng=rng)
        return HolonomyClassification("trivial", est, dists)
    dists = invariant_subspaces(est, g, rng=rng)
    if dists:
        return HolonomyClassification("reducible", est, dists)
    if est.algebra_dim >= full_dim:
        return HolonomyClassification("generic", est, [])
    j = complex_structure_search(est, rng=rng)
    if j is not None and est.algebra_dim <= (n // 2) ** 2:
        j_coord = est.frame @ j @ np.linalg.inv(est.frame)
        return HolonomyClassification(
            "unitary", est, [], complex_structure=j_coord,
            note="local-symmetry not tested; label may overlap other classes")
    return HolonomyClassification("undetermined", est, [])


# -- parallel-field verification -------------------------------------------


def verify_parallel_field(g: MetricField, xi: VectorField, x0, tol=1e-6,
                          lengths=(0.1, 0.2), backend=None):
    """Check that transporting xi along short curves reproduces the field.

    Raises NotParallelError when the per-unit-length defect exceeds tol;
    returns the largest defect observed.
    """
    x0 = np.asarray(x0, dtype=float)
    n = g.chart.dim
    worst = 0.0
    for length in lengths:
        for i in range(n):
            step = np.zeros(n)
            step[i] = length
            for sgn in (1.0, -1.0):
                end = x0 + sgn * step
                try:
                    g.chart.check_inside(end)
                except OutOfDomainError:
                    continue
                path = polyline_path([x0, end])
                p = path_transport_matrix(g, path, steps=48, backend=backend)
                moved = p @ xi(x0)
                defect = float(np.max(np.abs(moved - xi(end)))) / length
                worst = max(worst, defect)
                if defect > tol:
                    raise NotParallelError(
                        f"field moved by {defect:.3e} per unit length under transport")
    return worst
