"""Forward-mode jet propagation and order-4 finite differences.

A :class:`Jet` carries the value and the first/second/third partial
derivatives of a quantity with respect to the chart coordinates, batched
over an arbitrary leading shape.  Fields are plain callables written
against the math functions in this module (``sin``, ``exp``, ...), which
dispatch on Jet vs ndarray, so the same field definition evaluates under
plain floats, dual propagation, and the finite-difference fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend, kernels
from .errors import DerivativeFailureError, OrderUnsupportedError

_FLOAT = np.float64


def _as_batch(value):
    return np.asarray(value, dtype=_FLOAT)


class Jet:
    """Truncated Taylor data of a scalar quantity in ``nvars`` coordinates.

    value has shape S (the batch shape), d1 has S+(n,), d2 has S+(n,n) and
    d3 has S+(n,n,n); d2/d3 are ``None`` below the corresponding order and
    symmetric in their derivative slots whenever present.
    """

    __slots__ = ("nvars", "order", "value", "d1", "d2", "d3")

    def __init__(self, nvars, order, value, d1, d2=None, d3=None):
        self.nvars = nvars
        self.order = order
        self.value = value
        self.d1 = d1
        self.d2 = d2
        self.d3 = d3

    # -- construction -------------------------------------------------

    @classmethod
    def constant(cls, value, nvars, order, batch_shape=()):
        value = np.broadcast_to(_as_batch(value), batch_shape).copy()
        n = nvars
        d1 = np.zeros(batch_shape + (n,))
        d2 = np.zeros(batch_shape + (n, n)) if order >= 2 else None
        d3 = np.zeros(batch_shape + (n, n, n)) if order >= 3 else None
        return cls(n, order, value, d1, d2, d3)

    @classmethod
    def variable(cls, value, index, nvars, order):
        value = _as_batch(value)
        shape = value.shape
        d1 = np.zeros(shape + (nvars,))
        d1[..., index] = 1.0
        d2 = np.zeros(shape + (nvars, nvars)) if order >= 2 else None
        d3 = np.zeros(shape + (nvars,) * 3) if order >= 3 else None
        return cls(nvars, order, value.copy(), d1, d2, d3)

    def _lift(self, other):
        if isinstance(other, Jet):
            if other.nvars != self.nvars or other.order != self.order:
                raise ValueError("jet arity/order mismatch")
            return other
        return Jet.constant(other, self.nvars, self.order, self.value.shape)

    # -- flattened views for the kernels ------------------------------

    def _flat(self):
        n = self.nvars
        shape = self.value.shape
        b = int(np.prod(shape)) if shape else 1
        out = [np.ascontiguousarray(self.value).reshape(b),
               np.ascontiguousarray(self.d1).reshape(b, n)]
        if self.order >= 2:
            out.append(np.ascontiguousarray(self.d2).reshape(b, n, n))
        if self.order >= 3:
            out.append(np.ascontiguousarray(self.d3).reshape(b, n, n, n))
        return out

    def _rewrap(self, flat_arrays):
        n = self.nvars
        shape = self.value.shape
        v = flat_arrays[0].reshape(shape)
        d1 = flat_arrays[1].reshape(shape + (n,))
        d2 = flat_arrays[2].reshape(shape + (n, n)) if self.order >= 2 else None
        d3 = flat_arrays[3].reshape(shape + (n,) * 3) if self.order >= 3 else None
        return Jet(n, self.order, v, d1, d2, d3)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.nvars, self.order, self.value + other, self.d1,
                       self.d2, self.d3)
        other = self._lift(other)
        return Jet(
            self.nvars,
            self.order,
            self.value + other.value,
            self.d1 + other.d1,
            self.d2 + other.d2 if self.order >= 2 else None,
            self.d3 + other.d3 if self.order >= 3 else None,
        )

    __radd__ = __add__

    def __neg__(self):
        return Jet(
            self.nvars,
            self.order,
            -self.value,
            -self.d1,
            -self.d2 if self.order >= 2 else None,
            -self.d3 if self.order >= 3 else None,
        )

    def __sub__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.nvars, self.order, self.value - other, self.d1,
                       self.d2, self.d3)
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return self.__neg__().__add__(other)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=_FLOAT)
            return Jet(
                self.nvars,
                self.order,
                self.value * other,
                self.d1 * other[..., None],
                self.d2 * other[..., None, None] if self.order >= 2 else None,
                self.d3 * other[..., None, None, None] if self.order >= 3 else None,
            )
        other = self._lift(other)
        a, b = self._flat(), other._flat()
        if self.order == 1:
            out = kernels.jet_mul_o1(a[0], a[1], b[0], b[1])
        elif self.order == 2:
            out = kernels.jet_mul_o2(a[0], a[1], a[2], b[0], b[1], b[2])
        else:
            out = kernels.jet_mul_o3(a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3])
        return self._rewrap(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self.__mul__(1.0 / np.asarray(other, dtype=_FLOAT))
        return self.__mul__(other.reciprocal())

    def __rtruediv__(self, other):
        return self.reciprocal().__mul__(other)

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            return exp(exponent * log(self))
        e = float(exponent)
        v = self.value
        if e == int(e):
            k = int(e)
            f0 = np.power(v, k)
            f1 = k * np.power(v, k - 1) if self.order >= 1 else None
            f2 = k * (k - 1) * np.power(v, k - 2) if self.order >= 2 else None
            f3 = k * (k - 1) * (k - 2) * np.power(v, k - 3) if self.order >= 3 else None
        else:
            f0 = np.power(v, e)
            f1 = e * np.power(v, e - 1)
            f2 = e * (e - 1) * np.power(v, e - 2) if self.order >= 2 else None
            f3 = e * (e - 1) * (e - 2) * np.power(v, e - 3) if self.order >= 3 else None
        return self.chain(f0, f1, f2, f3)

    def reciprocal(self):
        v = self.value
        f0 = 1.0 / v
        f1 = -f0 * f0
        f2 = -2.0 * f1 * f0 if self.order >= 2 else None
        f3 = -3.0 * f2 * f0 if self.order >= 3 else None
        return self.chain(f0, f1, f2, f3)

    def chain(self, f0, f1, f2=None, f3=None):
        """Compose with a univariate function given its derivative values."""
        n = self.nvars
        shape = self.value.shape
        b = int(np.prod(shape)) if shape else 1
        flat = self._flat()
        f0 = np.broadcast_to(_as_batch(f0), shape)
        f1f = np.ascontiguousarray(np.broadcast_to(_as_batch(f1), shape)).reshape(b)
        if self.order == 1:
            d1 = kernels.jet_chain_o1(f1f, flat[1])
            return Jet(n, 1, f0.copy(), d1.reshape(shape + (n,)))
        f2f = np.ascontiguousarray(np.broadcast_to(_as_batch(f2), shape)).reshape(b)
        if self.order == 2:
            d1, d2 = kernels.jet_chain_o2(f1f, f2f, flat[1], flat[2])
            return Jet(n, 2, f0.copy(), d1.reshape(shape + (n,)),
                       d2.reshape(shape + (n, n)))
        f3f = np.ascontiguousarray(np.broadcast_to(_as_batch(f3), shape)).reshape(b)
        d1, d2, d3 = kernels.jet_chain_o3(f1f, f2f, f3f, flat[1], flat[2], flat[3])
        return Jet(n, 3, f0.copy(), d1.reshape(shape + (n,)),
                   d2.reshape(shape + (n, n)), d3.reshape(shape + (n,) * 3))

    def __repr__(self):
        return f"Jet(n={self.nvars}, order={self.order}, value={self.value!r})"


def symmetrize(jet: Jet) -> Jet:
    """Average d2/d3 over their derivative-index permutations."""
    d2 = jet.d2
    d3 = jet.d3
    if d2 is not None:
        d2 = 0.5 * (d2 + np.swapaxes(d2, -1, -2))
    if d3 is not None:
        t = d3
        d3 = (
            t
            + np.transpose(t, axes=(*range(t.ndim - 3), -3, -1, -2))
            + np.transpose(t, axes=(*range(t.ndim - 3), -2, -3, -1))
            + np.transpose(t, axes=(*range(t.ndim - 3), -2, -1, -3))
            + np.transpose(t, axes=(*range(t.ndim - 3), -1, -3, -2))
            + np.transpose(t, axes=(*range(t.ndim - 3), -1, -2, -3))
        ) / 6.0
    return Jet(jet.nvars, jet.order, jet.value, jet.d1, d2, d3)


# -- math functions dispatching on Jet vs array ------------------------


def _chain_or_np(x, npf, derivs):
    if isinstance(x, Jet):
        v = x.value
        table = derivs(v)
        return x.chain(*table[: x.order + 1])
    return npf(x)


def sin(x):
    return _chain_or_np(x, np.sin, lambda v: (np.sin(v), np.cos(v), -np.sin(v), -np.cos(v)))


def cos(x):
    return _chain_or_np(x, np.cos, lambda v: (np.cos(v), -np.sin(v), -np.cos(v), np.sin(v)))


def exp(x):
    def derivs(v):
        e = np.exp(v)
        return (e, e, e, e)

    return _chain_or_np(x, np.exp, derivs)


def log(x):
    def derivs(v):
        inv = 1.0 / v
        return (np.log(v), inv, -inv * inv, 2.0 * inv * inv * inv)

    return _chain_or_np(x, np.log, derivs)


def sqrt(x):
    def derivs(v):
        r = np.sqrt(v)
        inv = 0.5 / r
        return (r, inv, -0.5 * inv / v, 0.75 * inv / (v * v))

    return _chain_or_np(x, np.sqrt, derivs)


def power(x, e):
    if isinstance(x, Jet):
        return x.__pow__(e)
    return np.power(x, e)


# -- coordinate seeding ------------------------------------------------


def coordinate_jets(x, order):
    """Seed one Jet per coordinate from points ``x`` of shape (..., n)."""
    x = _as_batch(x)
    n = x.shape[-1]
    return [Jet.variable(x[..., i], i, n, order) for i in range(n)]


# -- finite differences ------------------------------------------------

# Order-4 central stencils on uniform spacing 1 (scaled by h at use time).
_D1 = {-2: 1.0 / 12.0, -1: -8.0 / 12.0, 1: 8.0 / 12.0, 2: -1.0 / 12.0}
_D2 = {-2: -1.0 / 12.0, -1: 16.0 / 12.0, 0: -30.0 / 12.0, 1: 16.0 / 12.0, 2: -1.0 / 12.0}


def _convolve(s1, s2):
    out = {}
    for o1, w1 in s1.items():
        for o2, w2 in s2.items():
            out[o1 + o2] = out.get(o1 + o2, 0.0) + w1 * w2
    return out


_D3 = _convolve(_D1, _D2)

_AXIS_STENCILS = {1: _D1, 2: _D2, 3: _D3}


def _multi_stencil(multiplicities, n):
    """Tensor-product stencil for one mixed partial, offsets in Z^n."""
    stencil = {(0,) * n: 1.0}
    for axis, mult in multiplicities.items():
        axis_stencil = _AXIS_STENCILS[mult]
        new = {}
        for offset, w in stencil.items():
            for o, w2 in axis_stencil.items():
                key = tuple(offset[a] + (o if a == axis else 0) for a in range(n))
                new[key] = new.get(key, 0.0) + w * w2
        stencil = new
    return stencil


def fd_step_sizes(lo, hi):
    """Per-axis step: 1e-2 of the axis extent, clamped to [1e-4, 1e-1]."""
    h = 1e-2 * (np.asarray(hi, dtype=_FLOAT) - np.asarray(lo, dtype=_FLOAT))
    return np.clip(h, 1e-4, 1e-1)


def _derivative_index_sets(n, order):
    sets = []
    if order >= 1:
        sets += [(i,) for i in range(n)]
    if order >= 2:
        sets += [(i, j) for i in range(n) for j in range(i, n)]
    if order >= 3:
        sets += [(i, j, k) for i in range(n) for j in range(i, n) for k in range(j, n)]
    return sets


def fd_eval(values_fn, x, order, h, wrap=None):
    """Finite-difference jet of a field given its plain-value evaluator.

    values_fn maps a list of coordinate arrays (batch shape) to an array of
    shape batch+tensor_shape.  Returns (value, d1, d2, d3) with the
    derivative indices placed right after the batch axes.
    """
    x = _as_batch(x)
    n = x.shape[-1]
    batch_shape = x.shape[:-1]
    h = np.broadcast_to(np.asarray(h, dtype=_FLOAT), (n,))

    index_sets = _derivative_index_sets(n, order)
    stencils = []
    point_index = {(0,) * n: 0}
    for idx in index_sets:
        mult = {}
        for a in idx:
            mult[a] = mult.get(a, 0) + 1
        stencil = _multi_stencil(mult, n)
        for offset in stencil:
            if offset not in point_index:
                point_index[offset] = len(point_index)
        stencils.append((idx, mult, stencil))

    offsets = np.array(sorted(point_index, key=point_index.get), dtype=_FLOAT)
    pts = x[..., None, :] + offsets * h  # batch + (P, n)
    if wrap is not None:
        pts = wrap(pts)
    coords = [pts[..., i] for i in range(n)]
    raw = np.asarray(values_fn(coords), dtype=_FLOAT)
    tensor_shape = raw.shape[len(batch_shape) + 1:]
    value = raw[(*([slice(None)] * len(batch_shape)), 0)]

    d1 = np.zeros(batch_shape + (n,) + tensor_shape)
    d2 = np.zeros(batch_shape + (n, n) + tensor_shape) if order >= 2 else None
    d3 = np.zeros(batch_shape + (n, n, n) + tensor_shape) if order >= 3 else None

    for idx, mult, stencil in stencils:
        scale = 1.0
        for a, m in mult.items():
            scale /= h[a] ** m
        acc = np.zeros(batch_shape + tensor_shape)
        for offset, w in stencil.items():
            sel = (*([slice(None)] * len(batch_shape)), point_index[offset])
            acc += w * raw[sel]
        acc *= scale
        if len(idx) == 1:
            d1[(*([slice(None)] * len(batch_shape)), idx[0])] = acc
        elif len(idx) == 2:
            i, j = idx
            d2[(*([slice(None)] * len(batch_shape)), i, j)] = acc
            if i != j:
                d2[(*([slice(None)] * len(batch_shape)), j, i)] = acc
        else:
            import itertools

            for perm in set(itertools.permutations(idx)):
                d3[(*([slice(None)] * len(batch_shape)), *perm)] = acc
    return value, d1, d2, d3


# -- unified field evaluation -------------------------------------------


@dataclass
class TensorJet:
    """Jet of a tensor-valued field; derivative indices come first.

    value: batch+shape, d1: batch+(n,)+shape, d2: batch+(n,n)+shape.
    """

    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray | None = None
    d3: np.ndarray | None = None


def _stack_jets(entries, nvars, order, batch_shape):
    """Stack a nested list of Jet/scalars into TensorJet arrays."""

    def walk(node):
        if isinstance(node, (list, tuple)):
            return [walk(c) for c in node]
        if not isinstance(node, Jet):
            return Jet.constant(node, nvars, order, batch_shape)
        if node.value.shape != batch_shape:
            return Jet(
                node.nvars,
                node.order,
                np.broadcast_to(node.value, batch_shape),
                np.broadcast_to(node.d1, batch_shape + (nvars,)),
                np.broadcast_to(node.d2, batch_shape + (nvars,) * 2) if order >= 2 else None,
                np.broadcast_to(node.d3, batch_shape + (nvars,) * 3) if order >= 3 else None,
            )
        return node

    tree = walk(entries)

    def collect(node, getter):
        # stack along axis 0 so the tensor indices end up leading, in order
        if isinstance(node, list):
            return np.stack([collect(c, getter) for c in node], axis=0)
        return getter(node)

    def tensor_last(a, tensor_rank):
        if tensor_rank == 0:
            return a
        return np.moveaxis(a, list(range(tensor_rank)),
                           list(range(a.ndim - tensor_rank, a.ndim)))

    def rank(node):
        return 1 + rank(node[0]) if isinstance(node, list) else 0

    t = rank(tree)
    value = tensor_last(collect(tree, lambda j: j.value), t)
    d1 = tensor_last(collect(tree, lambda j: j.d1), t)
    d2 = tensor_last(collect(tree, lambda j: j.d2), t) if order >= 2 else None
    d3 = tensor_last(collect(tree, lambda j: j.d3), t) if order >= 3 else None
    return TensorJet(value, d1, d2, d3)


def eval_scalar_jet(fn, x, order, h=None, wrap=None, backend_name=None):
    """Jet of a scalar field at points ``x`` of shape (..., n)."""
    if order not in (1, 2, 3):
        raise OrderUnsupportedError(f"derivative order {order} not in 1..3")
    which = backend.resolve_backend(backend_name)
    x = _as_batch(x)
    if which == backend.DUAL:
        coords = coordinate_jets(x, order)
        out = fn(coords)
        if not isinstance(out, Jet):
            out = Jet.constant(out, x.shape[-1], order, x.shape[:-1])
        jet = out
    else:
        if h is None:
            raise ValueError("finite-difference evaluation needs step sizes h")

        def values(cs):
            return np.broadcast_to(np.asarray(fn(cs), dtype=_FLOAT), cs[0].shape)

        value, d1, d2, d3 = fd_eval(values, x, order, h, wrap=wrap)
        jet = Jet(x.shape[-1], order, value, d1, d2, d3)
    if not np.all(np.isfinite(jet.value)) or not np.all(np.isfinite(jet.d1)):
        raise DerivativeFailureError("non-finite derivatives in field evaluation")
    return jet


def eval_tensor_jet(fn, x, order, h=None, wrap=None, backend_name=None):
    """Jet of a tensor field returning a nested list per point."""
    if order not in (0, 1, 2, 3):
        raise OrderUnsupportedError(f"derivative order {order} not in 0..3")
    which = backend.resolve_backend(backend_name)
    x = _as_batch(x)
    n = x.shape[-1]
    batch_shape = x.shape[:-1]
    if order == 0:
        coords = [x[..., i] for i in range(n)]
        raw = fn(coords)
        value = _stack_values(raw, batch_shape)
        return TensorJet(value, None)
    if which == backend.DUAL:
        coords = coordinate_jets(x, order)
        raw = fn(coords)
        tj = _stack_jets(raw, n, order, batch_shape)
    else:
        if h is None:
            raise ValueError("finite-difference evaluation needs step sizes h")

        def values(coords):
            return _stack_values(fn(coords), coords[0].shape)

        value, d1, d2, d3 = fd_eval(values, x, order, h, wrap=wrap)
        tj = TensorJet(value, d1, d2, d3)
    if not np.all(np.isfinite(tj.value)):
        raise DerivativeFailureError("non-finite values in tensor field evaluation")
    return tj


def _stack_values(node, batch_shape):
    if isinstance(node, (list, tuple)):
        rows = [_stack_values(c, batch_shape) for c in node]
        return np.stack(rows, axis=len(batch_shape))
    return np.broadcast_to(np.asarray(node, dtype=_FLOAT), batch_shape)


def math_namespace():
    """Functions usable inside field definitions (shared with the parser)."""
    return {
        "sin": sin,
        "cos": cos,
        "exp": exp,
        "log": log,
        "sqrt": sqrt,
        "power": power,
        "pi": math.pi,
    }
