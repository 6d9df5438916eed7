import json
import pandas as pd
import pytest
from components.traceability import render_traceability, traceability_matrix
from core.errors import WarpError
from core.schema import PhaseRow, make_report
from report_utils import emit_report, load_reports, reports_to_json, rng_for, stable_seed, summary_text


@pytest.fixture
def reports():
    a = make_report("adjoint[n=3]", 1e-15, 1e-12)
    b = make_report("composition[n=3]", 1.0, 1e-12)
    c = make_report("locality_free_field[K=1]", 0.3, 1e-10, hard=False, notes="truncation")
    a.suite, b.suite, c.suite = "lemmas", "lemmas", "axioms"
    return [b, c, a]


def test_stable_seed_is_deterministic():
    assert stable_seed("42", "lemmas", "adjoint") == stable_seed("42", "lemmas", "adjoint")
    assert stable_seed("42", "lemmas", "adjoint") != stable_seed("42", "lemmas", "composition")
    assert 0 <= stable_seed("x") < 2**31
    assert rng_for(42, "geometry").normal() == rng_for(42, "geometry").normal()


def test_json_is_sorted_and_uses_pass_key(reports, tmp_path):
    path = emit_report(reports, "json", tmp_path)
    assert path.name == "reports.json"
    data = json.loads(path.read_text())
    assert [r["check_id"] for r in data] == ["adjoint[n=3]", "composition[n=3]", "locality_free_field[K=1]"]
    assert data[1]["pass"] is False
    assert data[0]["runtime_ms"] is None


def test_json_output_is_byte_stable(reports):
    assert reports_to_json(reports) == reports_to_json(list(reports))


def test_load_reports_round_trip(reports, tmp_path):
    path = emit_report(reports, "json", tmp_path)
    loaded = load_reports(path)
    assert [r.check_id for r in loaded] == sorted(r.check_id for r in reports)
    assert not loaded[1].passed
    assert not loaded[2].hard


def test_csv_writes_phase_table(reports, tmp_path):
    rows = [PhaseRow(d=2, m=1.0, kappa=1.0, p="(1.41421,-1)", q="(1.41421,1)", direction="in",
                     phase_re=-0.95, phase_im=0.31)]
    path = emit_report(reports, "csv", tmp_path, phase_rows=rows)
    assert path.name == "phases.csv"
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["d", "m", "kappa", "p", "q", "direction", "phase_re", "phase_im", "witness"]
    assert frame.loc[0, "witness"] == 0.0


def test_csv_without_phases_writes_checks(reports, tmp_path):
    path = emit_report(reports, "csv", tmp_path)
    assert path.name == "checks.csv"
    frame = pd.read_csv(path)
    assert len(frame) == 3
    assert "pass" in frame.columns


def test_text_summary_lists_failures_and_soft_results(reports, tmp_path):
    path = emit_report(reports, "text", tmp_path)
    text = path.read_text()
    assert "hard failures: 1" in text
    assert "FAIL composition[n=3]" in text
    assert "locality_free_field[K=1]" in text
    assert "traceability" in text


def test_empty_selection_raises(tmp_path):
    with pytest.raises(WarpError):
        emit_report([], "json", tmp_path)


def test_unknown_format_raises(reports, tmp_path):
    with pytest.raises(ValueError):
        emit_report(reports, "xml", tmp_path)


def test_traceability_matrix(reports):
    table = traceability_matrix(reports)
    assert list(table.columns) == ["lemmas", "axioms"]
    assert table.loc["(F_Q1)_Q2 = F_(Q1+Q2)", "lemmas"] == "0/1"
    assert table.loc["adjoints commute with the warped convolution", "lemmas"] == "1/1"
    assert table.loc["adjoints commute with the warped convolution", "axioms"] == ""


def test_traceability_without_reports():
    assert traceability_matrix([]).empty
    assert render_traceability([]) == "no checks ran"
    assert "checks: 0" in summary_text([])
