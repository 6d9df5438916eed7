"""Command-line entry point: ``python app.py --suite lemmas --seed 42 --format json``."""
from __future__ import annotations
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
import argparse
import json
import logging
import sys
from pydantic import ValidationError
from checks.models import fock_model
from core.errors import ConfigError, DimensionGuardError
from core.schema import SUITES, RunConfig, coerce_and_fill
from report_utils import emit_report, load_reports
from runner import hard_failures, run_all

logger = logging.getLogger("warpcheck")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2

def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Verify warped-convolution deformations on finite models.")
    parser.add_argument("--config", type=Path, default=None, help="JSON config file (nested or dot keys)")
    parser.add_argument("--suite", action="append", default=None,
                        help=f"Suite to run, repeatable or comma separated: {', '.join(SUITES)}, all")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--kappa", action="append", default=None,
                        help="Deformation parameter(s); repeatable or comma separated")
    parser.add_argument("--dim", type=int, default=None,
                        help="Spacetime dimension added to the geometry sweep; other suites keep their own")
    parser.add_argument("--out", type=str, default=None, help="Output directory")
    parser.add_argument("--format", choices=("json", "csv", "text"), default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--timings", action="store_true", help="Record runtime_ms (breaks byte-identical output)")
    parser.add_argument("--reload", type=Path, default=None,
                        help="Re-emit a stored reports.json in --format instead of running suites")
    parser.add_argument("--log-level", default="WARNING",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    return parser.parse_args(argv)

def _split(values: Optional[List[str]]) -> Optional[List[str]]:
    if values is None:
        return None
    return [v.strip() for raw in values for v in raw.split(",") if v.strip()]

def build_config(args: argparse.Namespace) -> RunConfig:
    """File first, then flags as dot-key overrides."""
    raw: Dict[str, Any] = {}
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {args.config}: {err}") from err
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    overrides: Dict[str, Any] = {
        "suites": _split(args.suite),
        "seed": args.seed,
        "model.kappas": [float(k) for k in _split(args.kappa)] if args.kappa else None,
        "model.dim": args.dim,
        "out": args.out,
        "format": args.format,
        "workers": args.workers,
        "record_timings": True if args.timings else None,
    }
    base = coerce_and_fill(raw)
    return coerce_and_fill({k: v for k, v in overrides.items() if v is not None}, base=base)

def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = build_config(args)
    except (ConfigError, ValidationError, ValueError) as err:
        logger.error("configuration error: %s", err)
        return EXIT_CONFIG

    if args.reload is not None:
        try:
            reports = load_reports(args.reload)
        except (OSError, ValueError) as err:
            logger.error("cannot reload %s: %s", args.reload, err)
            return EXIT_CONFIG
        path = emit_report(reports, config.format, config.out)
        print(path)
        return EXIT_FAILED if hard_failures(reports) else EXIT_OK

    fixed = [s for s in config.selected_suites() if s != "geometry"]
    if config.model.dim != 2 and fixed:
        logger.warning("model.dim=%d only widens the geometry sweep; %s keep their own dimensions",
                       config.model.dim, ", ".join(fixed))
    try:
        fock_model(config)     # dimension guard before any suite runs
        reports, rows = run_all(config)
    except (ConfigError, DimensionGuardError, ValidationError) as err:
        logger.error("configuration error: %s", err)
        return EXIT_CONFIG
    if not reports:
        logger.error("suite selection produced no checks")
        return EXIT_CONFIG

    path = emit_report(reports, config.format, config.out, phase_rows=rows)
    failed = hard_failures(reports)
    print(f"{len(reports)} checks, {len(failed)} hard failures -> {path}")
    return EXIT_FAILED if failed else EXIT_OK

if __name__ == "__main__":
    sys.exit(main())
