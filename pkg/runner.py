from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Sequence, Tuple
import logging
import time
import numpy as np
from checks import axioms, geometry, germ, lemmas, scattering
from core.errors import ConfigError, DimensionGuardError
from core.schema import SUITES, CheckReport, PhaseRow, RunConfig, make_report
from report_utils import rng_for

logger = logging.getLogger(__name__)

Family = Callable[[RunConfig, np.random.Generator], List[CheckReport]]

# -------------------------
# SUITE -> FAMILY DISPATCH
# -------------------------
SUITE_FAMILIES: Dict[str, Dict[str, Family]] = {
    "geometry": geometry.FAMILIES,
    "lemmas": lemmas.FAMILIES,
    "axioms": axioms.FAMILIES,
    "scattering": scattering.FAMILIES,
    "germ": germ.FAMILIES,
}

def _run_family(config: RunConfig, suite: str, name: str, family: Family) -> List[CheckReport]:
    rng = rng_for(config.seed, suite, name)
    start = time.perf_counter()
    try:
        reports = family(config, rng)
    except (ConfigError, DimensionGuardError):
        raise
    except Exception as err:
        # a crashing family is a failed hard check, not an aborted run
        logger.exception("%s/%s raised", suite, name)
        reports = [make_report(f"{name}[error]", float("inf"), 0.0, passed=False,
                               notes=f"{type(err).__name__}: {err}")]
    elapsed = (time.perf_counter() - start) * 1000.0
    for r in reports:
        r.suite = suite
        if config.record_timings:
            r.runtime_ms = elapsed / max(1, len(reports))
    return reports

def run_suite(config: RunConfig, suite: str) -> List[CheckReport]:
    """Run one suite (or ``"all"``) and return its reports sorted by check_id."""
    if suite == "all":
        return sorted((r for s in SUITES for r in run_suite(config, s)), key=lambda r: r.check_id)
    if suite not in SUITE_FAMILIES:
        raise ConfigError(f"unknown suite {suite!r}")
    families = SUITE_FAMILIES[suite]
    logger.info("suite %s: %d families (seed %d, workers %d)", suite, len(families), config.seed, config.workers)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_run_family, config, suite, n, f) for n, f in families.items()]
            batches = [fut.result() for fut in futures]
    else:
        batches = [_run_family(config, suite, n, f) for n, f in families.items()]
    reports = sorted((r for b in batches for r in b), key=lambda r: r.check_id)
    for r in reports:
        if r.hard and not r.passed:
            logger.warning("FAIL %s: residual %.3e, tol %.1e %s", r.check_id, r.residual, r.tol, r.notes)
    logger.info("suite %s: %d checks, %d hard failures", suite, len(reports),
                sum(r.hard and not r.passed for r in reports))
    return reports

def run_all(config: RunConfig, suites: Sequence[str] = ()) -> Tuple[List[CheckReport], List[PhaseRow]]:
    """Reports of the selected suites, plus the phase table when scattering is among them."""
    selected = list(suites) or config.selected_suites()
    reports = sorted((r for s in selected for r in run_suite(config, s)), key=lambda r: r.check_id)
    rows = scattering.phase_rows(config) if "scattering" in selected else []
    return reports, rows

def hard_failures(reports: Sequence[CheckReport]) -> List[CheckReport]:
    return [r for r in reports if r.hard and not r.passed]
