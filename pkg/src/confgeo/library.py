"""Named field families and seeded random generators for tests and scenarios.

Random fields are produced as expression strings (parsed by the harness
grammar), so every generated object is serializable, reproducible from the
seed, and bounded: metrics stay uniformly SPD by construction.
"""

from __future__ import annotations

import numpy as np

from .chart import ChartDomain
from .conformal import ConformalPair, mobius_einstein_pair, rescale
from .curvature import MetricField
from .errors import ConfigParseError
from .exterior import PForm, index_combos
from .fields import ScalarField, VectorField
from .triple_warped import FactorSpec, TripleWarpedSpec, build_triple_warped

TWO_PI = 6.283185307179586


def unit_chart(dim, periodic=False, grid_res=8):
    return ChartDomain(
        lo=(0.0,) * dim if periodic else (-1.0,) * dim,
        hi=(1.0,) * dim,
        periodic=(bool(periodic),) * dim,
        grid_res=(grid_res,) * dim,
    )


def sphere_chart(grid_res=12):
    return ChartDomain(lo=(0.45, 0.0), hi=(2.65, TWO_PI),
                       periodic=(False, True), grid_res=(grid_res, grid_res),
                       names=("theta", "phi"))


def sphere_metric(grid_res=12) -> MetricField:
    chart = sphere_chart(grid_res)
    return MetricField.diagonal(chart, ["1", "sin(theta)^2"], name="sphere")


def warped_block_metric(warp="sin(t)") -> MetricField:
    """g = dx^2 + dt^2 + e^{-2 warp(t)} dy^2 on a unit box."""
    chart = ChartDomain(lo=(-1.0,) * 3, hi=(1.0,) * 3, names=("x", "t", "y"))
    return MetricField.diagonal(chart, ["1", "1", f"exp(-2*({warp}))"],
                                name=f"warped[{warp}]")


def build_metric(spec: dict) -> MetricField:
    """Instantiate a metric family from a scenario description."""
    family = spec.get("family")
    if family == "flat":
        chart = _chart_from(spec)
        return MetricField.flat(chart)
    if family == "sphere":
        return sphere_metric(int(spec.get("grid_res", 12)))
    if family == "warped":
        return warped_block_metric(spec.get("warp", "sin(t)"))
    if family == "expr":
        chart = _chart_from(spec)
        rows = spec.get("components")
        if not rows:
            raise ConfigParseError("expr metric needs a components matrix")
        return MetricField.from_expressions(chart, rows, name="expr")
    raise ConfigParseError(f"unknown metric family {family!r}")


def build_conformal_pair(spec: dict) -> ConformalPair:
    family = spec.get("family", "mobius-einstein")
    if family == "mobius-einstein":
        chart = _chart_from(spec, default_dim=3)
        return mobius_einstein_pair(chart, float(spec.get("c", 1.0)))
    if family == "rescale":
        g = build_metric(spec.get("metric", {"family": "flat", "dim": 3}))
        phi = ScalarField.from_expression(g.chart, spec.get("phi", "0"))
        return rescale(g, phi)
    raise ConfigParseError(f"unknown conformal pair family {family!r}")


def _chart_from(spec, default_dim=3):
    dim = int(spec.get("dim", default_dim))
    if "lo" in spec or "hi" in spec:
        return ChartDomain(
            lo=tuple(spec["lo"]), hi=tuple(spec["hi"]),
            periodic=tuple(spec.get("periodic", ())),
            grid_res=tuple(spec.get("grid_res", ())),
            names=tuple(spec.get("names", ())),
        )
    return unit_chart(dim, periodic=bool(spec.get("periodic", False)))


# -- seeded random expression builders -------------------------------------


def _round(v):
    return float(np.round(v, 6))


def random_scalar_expression(chart: ChartDomain, rng, amplitude=0.3, terms=3):
    """Bounded polynomial/trig expression in the chart's coordinates."""
    names = chart.names
    parts = []
    budget = amplitude / terms
    for _ in range(terms):
        coef = _round(rng.uniform(0.3, 1.0) * budget * rng.choice([-1.0, 1.0]))
        kind = rng.integers(0, 4)
        a = rng.integers(0, len(names))
        b = rng.integers(0, len(names))
        phase = _round(rng.uniform(0, TWO_PI))
        if kind == 0:
            parts.append(f"{coef}*sin({names[a]} + {phase})")
        elif kind == 1:
            parts.append(f"{coef}*cos({names[a]} + {phase})")
        elif kind == 2:
            parts.append(f"{coef}*{names[a]}*{names[b]}")
        else:
            parts.append(f"{coef}*{names[a]}")
    return " + ".join(parts)


def random_scalar_field(chart, rng, amplitude=0.3, terms=3) -> ScalarField:
    return ScalarField.from_expression(
        chart, random_scalar_expression(chart, rng, amplitude, terms))


def random_metric(chart: ChartDomain, rng, deviation=0.4) -> MetricField:
    """Identity plus a bounded random symmetric perturbation (uniformly SPD)."""
    n = chart.dim
    amp = deviation / n
    rows = []
    for i in range(n):
        rows.append([""] * n)
    for i in range(n):
        for j in range(i, n):
            expr = random_scalar_expression(chart, rng, amplitude=amp, terms=2)
            if i == j:
                expr = f"1 + {expr}"
            rows[i][j] = expr
            rows[j][i] = expr
    return MetricField.from_expressions(chart, rows, name="random")


def random_conformal_pair(chart, rng, metric_deviation=0.4, phi_amplitude=0.3):
    g = random_metric(chart, rng, metric_deviation)
    phi = random_scalar_field(chart, rng, phi_amplitude)
    return rescale(g, phi)


def random_vector_field(chart, rng, amplitude=0.5) -> VectorField:
    comps = [random_scalar_expression(chart, rng, amplitude, terms=2)
             for _ in range(chart.dim)]
    return VectorField.from_expressions(chart, comps)


def random_pform(chart, rng, degree, amplitude=0.5) -> PForm:
    combos = index_combos(chart.dim, degree)
    components = {}
    for combo in combos:
        components[combo] = random_scalar_expression(chart, rng, amplitude, terms=2)
    return PForm.from_expressions(chart, degree, components, name="random")


def periodic_scalar_expression(chart, rng, amplitude=0.3, terms=3):
    """Trig expression with integer frequencies: smooth on a unit torus."""
    names = chart.names
    parts = []
    budget = amplitude / terms
    for _ in range(terms):
        coef = _round(rng.uniform(0.3, 1.0) * budget * rng.choice([-1.0, 1.0]))
        a = names[rng.integers(0, len(names))]
        b = names[rng.integers(0, len(names))]
        freq = int(rng.integers(1, 3))
        fn1, fn2 = rng.choice(["sin", "cos"]), rng.choice(["sin", "cos"])
        parts.append(f"{coef}*{fn1}(2*pi*{freq}*{a})*{fn2}(2*pi*{b})")
    return " + ".join(parts)


def periodic_random_metric(chart, rng, deviation=0.3) -> MetricField:
    """Identity plus a bounded periodic symmetric perturbation."""
    n = chart.dim
    amp = deviation / n
    rows = [[""] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            expr = periodic_scalar_expression(chart, rng, amplitude=amp, terms=2)
            rows[i][j] = f"1 + {expr}" if i == j else expr
            rows[j][i] = rows[i][j]
    return MetricField.from_expressions(chart, rows, name="periodic random")


def periodic_random_pform(chart, rng, degree, amplitude=0.5) -> PForm:
    combos = index_combos(chart.dim, degree)
    components = {c: periodic_scalar_expression(chart, rng, amplitude, terms=2)
                  for c in combos}
    return PForm.from_expressions(chart, degree, components, name="periodic random")


def parallel_pform(chart, rng, degree, amplitude=1.0) -> PForm:
    """Constant-coefficient form: parallel for the flat metric."""
    combos = index_combos(chart.dim, degree)
    coeffs = [float(np.round(rng.normal() * amplitude, 6)) for _ in combos]
    return PForm.constant(chart, degree, coeffs, name="parallel")


_WARPED_DIM_CHOICES = ((1, 1, 1), (1, 1, 2), (1, 2, 1), (2, 1, 1), (1, 2, 2))


def random_triple_warped_spec(rng, dims=None) -> TripleWarpedSpec:
    """Random factor metrics (diagonal, SPD) and a random non-constant warp."""
    if dims is None:
        dims = _WARPED_DIM_CHOICES[rng.integers(0, len(_WARPED_DIM_CHOICES))]
    pools = (("x", "y"), ("s", "t"), ("u", "v", "w"))
    factors = []
    for f, dim in enumerate(dims):
        names = pools[f][:dim]
        rows = [["0"] * dim for _ in range(dim)]
        for i in range(dim):
            wob = random_scalar_expression_from_names(names, rng, amplitude=0.25)
            rows[i][i] = f"1 + {wob}"
        factors.append(FactorSpec.from_expressions(
            dim, (-1.0,) * dim, (1.0,) * dim, rows, names))
    warp_names = pools[1][:dims[1]]
    base = warp_names[rng.integers(0, len(warp_names))]
    coef = _round(rng.uniform(0.2, 0.5))
    phase = _round(rng.uniform(0, TWO_PI))
    warp = f"{coef}*sin({base} + {phase})"
    return TripleWarpedSpec.with_expression_warp(*factors, warp)


def random_scalar_expression_from_names(names, rng, amplitude=0.3, terms=2):
    chart_like = type("N", (), {"names": tuple(names)})
    return random_scalar_expression(chart_like, rng, amplitude, terms)


def random_triple_warped_pair(rng, dims=None):
    return build_triple_warped(random_triple_warped_spec(rng, dims))


def parallel_certificate_config():
    """Flat slab with g~ hyperbolic: phi = -log(z), parallel field d/dx."""
    chart = ChartDomain(lo=(-1.0, -1.0, 0.5), hi=(1.0, 1.0, 1.5),
                        names=("x", "y", "z"))
    g = MetricField.flat(chart)
    phi = ScalarField.from_expression(chart, "-log(z)")
    xi = VectorField.from_expressions(chart, ["1", "0", "0"])
    return rescale(g, phi), xi
