"""Scenario configuration: built-in registry, JSON loading, and execution."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

from . import checks as checks_mod
from .checks import REGISTRY, Context, run_check
from .errors import ConfigParseError, GeometryError, InternalCheckError
from .report import VerificationReport


@dataclass
class ScenarioConfig:
    name: str
    description: str = ""
    checks: list = dc_field(default_factory=list)
    params: dict = dc_field(default_factory=dict)
    seed: int = 0
    backend: str = "dual"
    tolerances: dict = dc_field(default_factory=dict)

    def validate(self):
        if self.backend not in ("dual", "fd"):
            raise ConfigParseError(f"unknown backend {self.backend!r}")
        for cid in self.checks:
            if cid not in REGISTRY:
                raise ConfigParseError(f"unknown check id {cid!r}")
        for cid, tol in self.tolerances.items():
            if cid not in REGISTRY:
                raise ConfigParseError(f"tolerance override for unknown check {cid!r}")
            if not float(tol) >= 0.0:
                raise ConfigParseError("tolerances must be non-negative")
        if "metric" in self.params:
            from .library import build_metric

            build_metric(self.params["metric"])  # raises ConfigParseError early
        return self


_CONFORMAL_CHECKS = [
    "conformal.connection-law",
    "conformal.trace-free-ricci",
    "conformal.scalar-law",
    "conformal.involution",
    "conformal.vector-invariance",
]

_TWISTOR_CHECKS = [
    "exterior.transport-d",
    "exterior.transport-nabla",
    "exterior.transport-delta",
    "exterior.twistor-invariance",
    "exterior.norm-law",
]

_HODGE_CHECKS = [
    "exterior.hodge-involution",
    "exterior.hodge-interior-wedge",
    "exterior.delta-two-routes",
    "exterior.d-squared",
    "exterior.delta-squared",
    "exterior.adjointness",
    "exterior.star-twistor-exchange",
    "exterior.basic-form",
]

_HOLONOMY_CHECKS = [
    "holonomy.flat-trivial",
    "holonomy.sphere-area",
    "holonomy.metric-preserved",
    "holonomy.product-block",
    "holonomy.loop-scaling",
    "holonomy.curvature-span",
    "holonomy.homothety",
]

_WARPED_CHECKS = [
    "warped.conjugate",
    "warped.parallel-residuals",
    "warped.reducible-labels",
    "warped.recovery",
    "warped.alignment",
    "warped.perturbation-detect",
]

_EINSTEIN_CHECKS = [
    "conformal.einstein-pair",
    "conformal.mobius-vector",
]

_PARALLEL_CHECKS = [
    "conformal.parallel-scalar-identity",
    "conformal.parallel-detect",
]

_CHART_CHECKS = [
    "chart.backend-agreement",
    "chart.periodic-integral",
    "chart.gram-schmidt",
]


BUILTIN_SCENARIOS = {}


def _builtin(name, description, check_ids, params=None):
    BUILTIN_SCENARIOS[name] = ScenarioConfig(
        name=name, description=description, checks=list(check_ids),
        params=params or {})


_builtin("chart-core", "differentiation backends, quadrature, frames",
         _CHART_CHECKS)
_builtin("conformal-identities-n3",
         "conformal rescaling identity residuals on random 3d chart pairs",
         _CONFORMAL_CHECKS, {"dims": (3,), "pairs": 10})
_builtin("conformal-identities-suite",
         "rescaling identities on 50 random pairs across dims 2, 3, 4",
         _CONFORMAL_CHECKS, {"dims": (2, 3, 4), "pairs": 50})
_builtin("twistor-transport-n3",
         "conformal transport of forms on random 3d triples",
         _TWISTOR_CHECKS, {"dims": (3,), "triples": 12})
_builtin("twistor-transport-suite",
         "conformal transport of forms, 30 random triples in dims 3 and 4",
         _TWISTOR_CHECKS, {"dims": (3, 4), "triples": 30})
_builtin("hodge-identities",
         "Hodge star, codifferential routes, and adjointness",
         _HODGE_CHECKS)
_builtin("holonomy-golden",
         "flat/sphere/product golden holonomy values",
         _HOLONOMY_CHECKS)
_builtin("triple-warped-roundtrip",
         "construction, conjugate identity, reducibility, recovery",
         _WARPED_CHECKS, {"specs": 8})
_builtin("einstein-pair-mobius",
         "the inversion-family Einstein pair and its conformal vector",
         _EINSTEIN_CHECKS)
_builtin("parallel-field",
         "parallel-field certificate diagnostics and detection",
         _PARALLEL_CHECKS)
_builtin("full", "every registered check",
         _CHART_CHECKS + _CONFORMAL_CHECKS + _EINSTEIN_CHECKS + _PARALLEL_CHECKS
         + _TWISTOR_CHECKS + _HODGE_CHECKS + _HOLONOMY_CHECKS + _WARPED_CHECKS)


def load_scenario(source: str) -> ScenarioConfig:
    """Resolve a built-in scenario name or parse a JSON scenario file."""
    if source in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[source]
    try:
        with open(source, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigParseError(
            f"{source!r} is neither a built-in scenario nor a readable file"
        ) from exc
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"invalid JSON in {source}: {exc}") from exc
    return scenario_from_dict(raw)


def scenario_from_dict(raw: dict) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigParseError("scenario file must hold a JSON object")
    name = raw.get("scenario", "custom")
    base_checks = raw.get("checks")
    if base_checks is None and name in BUILTIN_SCENARIOS:
        base_checks = BUILTIN_SCENARIOS[name].checks
    if base_checks is None:
        raise ConfigParseError("scenario needs a checks list or a built-in name")
    cfg = ScenarioConfig(
        name=name,
        description=raw.get("description", ""),
        checks=list(base_checks),
        params=dict(raw.get("params", {})),
        seed=int(raw.get("seed", 0)),
        backend=raw.get("backend", "dual"),
        tolerances={k: float(v) for k, v in raw.get("tolerances", {}).items()},
    )
    return cfg.validate()


def run_scenario(config: ScenarioConfig, seed=None, backend=None,
                 tol_scale=1.0) -> VerificationReport:
    """Execute the configured checks in order; failures are recorded, not fatal."""
    config.validate()
    seed = config.seed if seed is None else seed
    backend = config.backend if backend is None else backend
    ctx = Context(seed=seed, backend=backend, params=config.params)
    report = VerificationReport(scenario=config.name, seed=seed, backend=backend)
    for cid in config.checks:
        try:
            record = run_check(cid, ctx, tol_override=config.tolerances.get(cid),
                               tol_scale=tol_scale)
        except GeometryError as exc:
            raise InternalCheckError(f"check {cid} failed to run: {exc}") from exc
        report.records.append(record)
    return report


def concordance_table():
    """(check id, anchor) rows for every registered check, sorted by id."""
    return [(cid, REGISTRY[cid].anchor) for cid in sorted(REGISTRY)]


def audit_concordance():
    return checks_mod.audit_anchors()
