"""Smooth field wrappers tied to a chart, plus the public jet evaluator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets
from .chart import ChartDomain
from .errors import OrderUnsupportedError
from .expressions import compile_expression


@dataclass
class ScalarField:
    """A smooth real field on a chart; fn accepts Jet or ndarray coordinates."""

    chart: ChartDomain
    fn: Callable
    smoothness: int = 3
    name: str = ""

    @classmethod
    def from_expression(cls, chart, text, smoothness=3):
        return cls(chart, compile_expression(text, chart.names), smoothness, name=text)

    @classmethod
    def constant(cls, chart, value):
        return cls(chart, lambda coords: value + 0.0 * coords[0], name=f"const {value}")

    def __call__(self, x):
        x = self.chart.wrap(np.asarray(x, dtype=float))
        coords = [x[..., i] for i in range(self.chart.dim)]
        return np.broadcast_to(np.asarray(self.fn(coords), dtype=float),
                               x.shape[:-1]).copy()

    def jet(self, x, order=2, backend=None):
        return eval_jet(self, x, order, backend=backend)


@dataclass
class VectorField:
    """Contravariant components of a vector field on a chart."""

    chart: ChartDomain
    components: list  # list of fn(coords) -> value
    name: str = ""

    @classmethod
    def from_expressions(cls, chart, texts):
        return cls(chart, [compile_expression(t, chart.names) for t in texts],
                   name=", ".join(texts))

    def __call__(self, x):
        x = self.chart.wrap(np.asarray(x, dtype=float))
        coords = [x[..., i] for i in range(self.chart.dim)]
        vals = [np.broadcast_to(np.asarray(c(coords), dtype=float), x.shape[:-1])
                for c in self.components]
        return np.stack(vals, axis=-1)

    def jet(self, x, order=1, backend=None):
        x = self.chart.check_inside(x)
        return jets.eval_tensor_jet(
            lambda coords: [c(coords) for c in self.components],
            x, order, h=self.chart.fd_h, wrap=self.chart.wrap, backend_name=backend,
        )


def eval_jet(field: ScalarField, x, order=2, backend=None):
    """Jet of a scalar field at x (batched); the chart's FD steps apply."""
    if order > getattr(field, "smoothness", 3):
        raise OrderUnsupportedError(
            f"order {order} above declared smoothness {field.smoothness}")
    chart = field.chart
    x = chart.check_inside(x)
    return jets.eval_scalar_jet(field.fn, x, order, h=chart.fd_h,
                                wrap=chart.wrap, backend_name=backend)
