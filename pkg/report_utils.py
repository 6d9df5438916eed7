from __future__ import annotations
from pathlib import Path
from typing import Iterable, List, Sequence
import json
import logging
import zlib
import numpy as np
import pandas as pd
from core.errors import WarpError
from core.schema import CheckReport, PhaseRow

logger = logging.getLogger(__name__)

# -------------------------
# SEEDING
# -------------------------
def stable_seed(*parts: str, base: int = 20240823) -> int:
    """Deterministic seed from string parts, independent of PYTHONHASHSEED."""
    return (base ^ zlib.crc32(("||".join(parts)).encode("utf-8"))) & 0x7FFFFFFF

def rng_for(seed: int, *parts: str) -> np.random.Generator:
    return np.random.default_rng(stable_seed(str(seed), *parts))

# -------------------------
# EMIT / LOAD
# -------------------------
REPORT_FILES = {"json": "reports.json", "csv": "phases.csv", "text": "summary.txt"}
PHASE_COLUMNS = list(PhaseRow.model_fields)

def reports_to_json(reports: Sequence[CheckReport]) -> str:
    payload = [r.model_dump(by_alias=True) for r in reports]
    return json.dumps(payload, sort_keys=True, indent=2)

def reports_frame(reports: Sequence[CheckReport]) -> pd.DataFrame:
    rows = [{"check_id": r.check_id, "anchor": r.anchor, "suite": r.suite, "residual": r.residual,
             "tol": r.tol, "pass": r.passed, "hard": r.hard, "notes": r.notes} for r in reports]
    return pd.DataFrame(rows, columns=["check_id", "anchor", "suite", "residual", "tol", "pass", "hard", "notes"])

def phases_frame(rows: Sequence[PhaseRow]) -> pd.DataFrame:
    return pd.DataFrame([r.model_dump() for r in rows], columns=PHASE_COLUMNS)

def summary_text(reports: Sequence[CheckReport]) -> str:
    from components.traceability import render_traceability
    hard = [r for r in reports if r.hard]
    failed = [r for r in hard if not r.passed]
    lines = [f"checks: {len(reports)} (hard {len(hard)}, soft {len(reports) - len(hard)})",
             f"hard failures: {len(failed)}"]
    for r in failed:
        lines.append(f"  FAIL {r.check_id}: residual {r.residual:.3e} >= tol {r.tol:.1e} {r.notes}".rstrip())
    soft = [r for r in reports if not r.hard]
    if soft:
        lines.append("soft results:")
        lines.extend(f"  {r.check_id}: {r.residual:.3e} {r.notes}".rstrip() for r in soft)
    lines.append("")
    lines.append(render_traceability(reports))
    return "\n".join(lines) + "\n"

def emit_report(reports: Sequence[CheckReport], format: str, out: str | Path,
                phase_rows: Iterable[PhaseRow] = ()) -> Path:
    """Write reports in ``format`` under the directory ``out`` and return the file path."""
    reports = sorted(reports, key=lambda r: r.check_id)
    if not reports:
        raise WarpError("no reports to emit: the suite selection is empty")
    if format not in REPORT_FILES:
        raise ValueError(f"unknown report format {format!r}")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / REPORT_FILES[format]
    if format == "json":
        path.write_text(reports_to_json(reports) + "\n", encoding="utf-8")
    elif format == "csv":
        rows = list(phase_rows)
        frame = phases_frame(rows) if rows else reports_frame(reports)
        if not rows:
            path = out / "checks.csv"
        frame.to_csv(path, index=False, lineterminator="\n")
    else:
        path.write_text(summary_text(reports), encoding="utf-8")
    logger.info("wrote %d reports to %s", len(reports), path)
    return path

def load_reports(path: str | Path) -> List[CheckReport]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [CheckReport.model_validate(item) for item in data]
