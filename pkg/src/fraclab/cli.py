"""Command-line entry point: ``fraclab {constants,check-model,solve,sweep}``.

Exit status is 0 on success, 1 on invalid input or a failed model check,
and 2 when a solve does not converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from fraclab.config import ConfigError, load_config
from fraclab.constants import constants_report
from fraclab.discretization import assemble_operator
from fraclab.exceptions import FracLabError, NonConvergence
from fraclab.model import check_assumptions
from fraclab.nehari import EnergyContext
from fraclab.solver import solve_ground_state
from fraclab.transition import emit_report, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGED = 0, 1, 2


def _cmd_constants(args) -> int:
    try:
        report = constants_report(args.N, args.s, args.q)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK


def _cmd_check_model(args) -> int:
    cfg = load_config(args.config)
    report = check_assumptions(cfg.model, cfg.potential, cfg.grid.bounds, samples=args.samples, u_range=args.u_range, seed=args.seed)
    out = report.to_dict()
    out["config_hash"] = cfg.hash
    print(json.dumps(out, indent=2))
    return EXIT_OK if report.passed else EXIT_INVALID


def _cmd_solve(args) -> int:
    cfg = load_config(args.config)
    if not 0.5 < args.s <= 1.0:
        print(f"error: --s {args.s} outside (1/2, 1]", file=sys.stderr)
        return EXIT_INVALID
    ctx = EnergyContext(assemble_operator(cfg.grid, args.s), cfg.potential, cfg.model)
    gs = solve_ground_state(ctx, cfg.solver)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    pts = cfg.grid.nodes().reshape(cfg.grid.size, cfg.grid.dim)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "u"] if cfg.grid.dim == 1 else ["x", "y", "u"])
        for p, val in zip(pts, gs.u):
            w.writerow([repr(float(c)) for c in p] + [repr(float(val))])
    side = out.with_suffix(".json")
    meta = gs.diagnostics()
    meta.update(config_hash=cfg.hash, config=cfg.raw)
    side.write_text(json.dumps(meta, indent=2, sort_keys=True))
    if not gs.converged:
        print(f"warning: solve at s={args.s} did not converge; partial state written to {out}", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    sweep_cfg = cfg.sweep_config(allow_partial=True if args.allow_partial else None)
    result = run_sweep(sweep_cfg)
    emit_report(result, args.out, extra_meta={"config_hash": cfg.hash})
    if not all(r.converged for r in result.rows):
        return EXIT_NONCONVERGED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraclab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="print the constants report as JSON")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--q", type=float, default=None)
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("check-model", help="sampled checks of the model hypotheses")
    p.add_argument("--config", required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--u-range", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_check_model)

    p = sub.add_parser("solve", help="compute one ground state")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--s", type=float, default=1.0)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="run the s -> 1 sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--allow-partial", action="store_true")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_INVALID
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except FracLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
