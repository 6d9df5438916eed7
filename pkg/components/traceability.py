from __future__ import annotations
from typing import Sequence
import pandas as pd
from core.schema import CheckReport, SUITES

def traceability_matrix(reports: Sequence[CheckReport]) -> pd.DataFrame:
    """anchor x suite table of "passed/total" cells; empty cells mean no check ran."""
    if not reports:
        return pd.DataFrame()
    df = pd.DataFrame([{"anchor": r.anchor, "suite": r.suite or "-", "passed": int(r.passed)} for r in reports])
    grouped = df.groupby(["anchor", "suite"])["passed"].agg(["sum", "count"])
    cells = grouped["sum"].astype(str) + "/" + grouped["count"].astype(str)
    table = cells.unstack("suite").fillna("")
    order = [s for s in SUITES if s in table.columns] + [s for s in table.columns if s not in SUITES]
    return table[order].sort_index()

def render_traceability(reports: Sequence[CheckReport]) -> str:
    table = traceability_matrix(reports)
    if table.empty:
        return "no checks ran"
    return "axiom traceability (passed/total)\n" + table.to_string()
