"""Command-line interface.

Subcommands: ``verify <scenario>``, ``holonomy <scenario>``,
``list-scenarios``, ``concordance``.  Exit codes: 0 all checks passed,
1 some check failed, 2 configuration error, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import ConfigParseError, GeometryError
from .report import emit_report
from .scenarios import (
    BUILTIN_SCENARIOS,
    audit_concordance,
    concordance_table,
    load_scenario,
    run_scenario,
)

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_INTERNAL_ERROR = 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="confgeo",
        description="chart-scale verification of conformal rescaling, twistor"
                    " form, holonomy, and triple warped product identities",
    )
    parser.add_argument("--backend", choices=("dual", "fd"), default=None,
                        help="differentiation backend (default: scenario's)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    parser.add_argument("--tol-scale", type=float, default=1.0,
                        help="multiply every check tolerance")
    parser.add_argument("--format", choices=("json", "text"), default="text",
                        help="report format")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a scenario's checks")
    p_verify.add_argument("scenario", help="built-in name or JSON file path")

    p_hol = sub.add_parser("holonomy",
                           help="classify the scenario's metric and run the"
                                " holonomy checks")
    p_hol.add_argument("scenario", help="built-in name or JSON file path")

    sub.add_parser("list-scenarios", help="list built-in scenarios")
    sub.add_parser("concordance",
                   help="print the check-id to verified-identity table")
    return parser


def _cmd_verify(args):
    config = load_scenario(args.scenario)
    report = run_scenario(config, seed=args.seed, backend=args.backend,
                          tol_scale=args.tol_scale)
    sys.stdout.write(emit_report(report, args.format))
    return EXIT_PASS if report.all_passed else EXIT_CHECK_FAILURE


def _cmd_holonomy(args):
    from .holonomy import classify_holonomy
    from .library import build_metric

    config = load_scenario(args.scenario)
    seed = config.seed if args.seed is None else args.seed
    metric_spec = config.params.get("metric", {"family": "warped"})
    g = build_metric(metric_spec)
    cls = classify_holonomy(g, rng=np.random.default_rng(seed),
                            samples=int(config.params.get("samples", 150)),
                            backend=args.backend or config.backend)
    lines = [
        f"metric: {g.name}",
        f"label: {cls.label}",
        f"algebra dimension: {cls.estimate.algebra_dim}",
        f"orthogonality defect: {cls.estimate.orthogonality_defect:.3e}",
        f"invariant distribution ranks: "
        f"{[d.rank for d in cls.invariant_distributions] or 'none'}",
    ]
    if cls.note:
        lines.append(f"note: {cls.note}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_PASS


def _cmd_list(_args):
    width = max(len(name) for name in BUILTIN_SCENARIOS)
    for name, cfg in BUILTIN_SCENARIOS.items():
        sys.stdout.write(f"{name:{width}s}  {cfg.description}\n")
    return EXIT_PASS


def _cmd_concordance(_args):
    missing = audit_concordance()
    if missing:
        sys.stderr.write(f"checks without anchors: {missing}\n")
        return EXIT_INTERNAL_ERROR
    rows = concordance_table()
    width = max(len(cid) for cid, _ in rows)
    for cid, anchor in rows:
        sys.stdout.write(f"{cid:{width}s}  {anchor}\n")
    sys.stdout.write(f"{len(rows)} checks, all anchored\n")
    return EXIT_PASS


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "verify": _cmd_verify,
        "holonomy": _cmd_holonomy,
        "list-scenarios": _cmd_list,
        "concordance": _cmd_concordance,
    }
    try:
        return handlers[args.command](args)
    except ConfigParseError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG_ERROR
    except GeometryError as exc:
        sys.stderr.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
