"""Coordinate boxes with optional periodic axes, grids, and quadrature."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NonPeriodicDomainWarning, NotSPDError, OutOfDomainError
from .jets import fd_step_sizes

_DEFAULT_NAMES = ("x", "y", "z", "w", "u", "v")


@dataclass(frozen=True)
class ChartDomain:
    """A coordinate box [lo, hi] with per-axis periodicity and grid size."""

    lo: tuple
    hi: tuple
    periodic: tuple = ()
    grid_res: tuple = ()
    names: tuple = ()

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        n = len(lo)
        if n < 2:
            raise ValueError("chart dimension must be at least 2")
        if len(hi) != n:
            raise ValueError("lo and hi must have the same length")
        periodic = tuple(bool(p) for p in self.periodic) or (False,) * n
        grid_res = tuple(int(r) for r in self.grid_res) or (8,) * n
        names = tuple(self.names) or tuple(
            _DEFAULT_NAMES[i] if i < len(_DEFAULT_NAMES) else f"x{i}" for i in range(n)
        )
        if len(periodic) != n or len(grid_res) != n or len(names) != n:
            raise ValueError("periodic/grid_res/names must match the dimension")
        for i in range(n):
            if not lo[i] < hi[i]:
                raise ValueError(f"axis {i}: lo must be strictly below hi")
            if grid_res[i] < 4:
                raise ValueError(f"axis {i}: grid resolution must be at least 4")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "periodic", periodic)
        object.__setattr__(self, "grid_res", grid_res)
        object.__setattr__(self, "names", names)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def widths(self) -> np.ndarray:
        return np.asarray(self.hi) - np.asarray(self.lo)

    @property
    def fd_h(self) -> np.ndarray:
        return fd_step_sizes(self.lo, self.hi)

    def wrap(self, x):
        """Map periodic coordinates back into [lo, hi)."""
        x = np.asarray(x, dtype=float)
        if not any(self.periodic):
            return x
        out = np.array(x, copy=True)
        lo = np.asarray(self.lo)
        w = self.widths
        for i in range(self.dim):
            if self.periodic[i]:
                out[..., i] = lo[i] + np.mod(out[..., i] - lo[i], w[i])
        return out

    def check_inside(self, x, slack=1e-12):
        """Raise OutOfDomainError for points beyond non-periodic bounds."""
        x = np.asarray(x, dtype=float)
        for i in range(self.dim):
            if self.periodic[i]:
                continue
            below = x[..., i] < self.lo[i] - slack
            above = x[..., i] > self.hi[i] + slack
            if np.any(below) or np.any(above):
                raise OutOfDomainError(
                    f"coordinate {self.names[i]} leaves [{self.lo[i]}, {self.hi[i]}]"
                )
        return self.wrap(x)

    def axis_points(self, i, res=None):
        r = res or self.grid_res[i]
        if self.periodic[i]:
            return np.linspace(self.lo[i], self.hi[i], r, endpoint=False)
        return np.linspace(self.lo[i], self.hi[i], r)

    def grid(self, res=None):
        """Full product grid, shape (M, n)."""
        axes = [self.axis_points(i, res if np.isscalar(res) or res is None else res[i])
                for i in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def quadrature(self, res=None):
        """Grid points and product weights for trapezoid/periodic quadrature."""
        axes, weights = [], []
        for i in range(self.dim):
            r = res if np.isscalar(res) or res is None else res[i]
            pts = self.axis_points(i, r)
            m = len(pts)
            if self.periodic[i]:
                w = np.full(m, self.widths[i] / m)
            else:
                w = np.full(m, self.widths[i] / (m - 1))
                w[0] *= 0.5
                w[-1] *= 0.5
            axes.append(pts)
            weights.append(w)
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=-1)
        wmesh = np.meshgrid(*weights, indexing="ij")
        w = np.ones(points.shape[0])
        for m in wmesh:
            w = w * m.ravel()
        return points, w

    def interior_sample(self, rng, count, margin=0.15):
        """Random interior points, kept away from non-periodic faces."""
        lo = np.asarray(self.lo)
        w = self.widths
        pad = np.where(self.periodic, 0.0, margin) * w
        return lo + pad + (w - 2 * pad) * rng.random((count, self.dim))

    def interior_grid(self, res=3, margin=0.15):
        """Product grid shrunk away from non-periodic faces."""
        axes = []
        for i in range(self.dim):
            if self.periodic[i]:
                axes.append(np.linspace(self.lo[i], self.hi[i], res, endpoint=False))
            else:
                pad = margin * (self.hi[i] - self.lo[i])
                axes.append(np.linspace(self.lo[i] + pad, self.hi[i] - pad, res))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


def integrate_chart(field, chart: ChartDomain, density=None, res=None):
    """Quadrature of field * density over the chart.

    Certified (spectrally accurate) only when every axis is periodic; a
    NonPeriodicDomainWarning flags the trapezoid-only case.
    """
    if not all(chart.periodic):
        warnings.warn(
            "chart has non-periodic axes; quadrature result is not certified",
            NonPeriodicDomainWarning,
            stacklevel=2,
        )
    points, w = chart.quadrature(res)
    coords = [points[..., i] for i in range(chart.dim)]
    values = np.broadcast_to(np.asarray(_call_values(field, coords), dtype=float),
                             points.shape[:-1])
    if density is not None:
        dens = np.broadcast_to(np.asarray(_call_values(density, coords), dtype=float),
                               points.shape[:-1])
        values = values * dens
    return float(np.sum(values * w))


def _call_values(field, coords):
    fn = getattr(field, "fn", field)
    return fn(coords)


def frame_gram_schmidt(g, basis=None, spd_tol=1e-13):
    """Orthonormalize a basis against the metric g (batched over leading axes).

    Returns a matrix E whose columns are the frame vectors, so that
    E^T g E = I.  Orientation of the input basis is preserved.  Raises
    NotSPDError when a pivot norm is not positive.
    """
    g = np.asarray(g, dtype=float)
    n = g.shape[-1]
    if basis is None:
        e = np.broadcast_to(np.eye(n), g.shape).copy()
    else:
        e = np.array(np.broadcast_to(np.asarray(basis, dtype=float), g.shape),
                     copy=True)
    scale = max(1.0, float(np.max(np.abs(g))))
    for a in range(n):
        v = e[..., :, a]
        for _ in range(2):  # second pass keeps the Gram error near round-off
            for b in range(a):
                prev = e[..., :, b]
                coef = np.einsum("...i,...ij,...j->...", v, g, prev)
                v = v - coef[..., None] * prev
        norm2 = np.einsum("...i,...ij,...j->...", v, g, v)
        if np.any(norm2 <= spd_tol * scale):
            raise NotSPDError("Gram-Schmidt pivot is not positive; metric not SPD")
        e[..., :, a] = v / np.sqrt(norm2)[..., None]
    return e
