import json
import numpy as np
import pytest
from core.errors import ConfigError
from core.schema import (SUITES, CheckReport, RunConfig, anchor_for, coerce_and_fill,
                         flatten_model, make_report)


def test_defaults():
    cfg = coerce_and_fill({})
    assert cfg.seed == 42
    assert cfg.model.kappas == [1.0]
    assert cfg.model.dim == 2
    assert cfg.tolerances.exact == 1e-12
    assert cfg.tolerances.unit == 1e-14
    assert cfg.battery.cesaro_times == [1.0, 10.0, 100.0]
    assert cfg.selected_suites() == list(SUITES)
    assert not cfg.record_timings


def test_short_aliases():
    cfg = coerce_and_fill({"kappa": "0.5, 2", "d": 3, "K": 2, "N_max": 3, "suite": "lemmas,germ"})
    assert cfg.model.kappas == [0.5, 2.0]
    assert cfg.model.dim == 3
    assert cfg.model.lattice_K == 2
    assert cfg.model.cutoff == 3
    assert cfg.selected_suites() == ["lemmas", "germ"]


def test_nested_and_dot_keys_agree():
    nested = coerce_and_fill({"model": {"mass": 2.0}, "battery": {"random_models": 7}})
    dotted = coerce_and_fill({"model.mass": 2.0, "battery.random_models": 7})
    assert nested == dotted


def test_scalar_becomes_list():
    assert coerce_and_fill({"kappa": 1.5}).model.kappas == [1.5]


def test_overrides_keep_base_values():
    base = coerce_and_fill({"seed": 7, "model.mass": 3.0})
    cfg = coerce_and_fill({"seed": 9}, base=base)
    assert cfg.seed == 9
    assert cfg.model.mass == 3.0


@pytest.mark.parametrize("raw", [
    {"bogus": 1},
    {"model.colour": "red"},
    {"kappa": -1.0},
    {"kappa": []},
    {"d": 1},
    {"suites": ["geometry", "nope"]},
    {"format": "xml"},
    {"workers": 0},
])
def test_invalid_configs_raise(raw):
    with pytest.raises(ConfigError):
        coerce_and_fill(raw)


def test_check_report_pass_alias():
    r = CheckReport.model_validate({"check_id": "adjoint[n=3]", "pass": False, "residual": 1.0, "tol": 1e-12})
    assert not r.passed
    dumped = r.model_dump(by_alias=True)
    assert dumped["pass"] is False
    assert "passed" not in dumped
    assert r.family == "adjoint"
    assert r.runtime_ms is None


def test_make_report_decides_pass_from_residual():
    assert make_report("adjoint", 1e-13, 1e-12).passed
    assert not make_report("adjoint", 1e-12, 1e-12).passed
    assert not make_report("adjoint", 0.0, 1e-12, passed=False).passed
    assert make_report("adjoint[seed=1]", 0.0, 1e-12).anchor == anchor_for("adjoint")


def test_params_are_json_plain():
    r = make_report("composition", np.float64(0.0), 1e-12,
                    params={"n": np.int64(3), "flag": np.bool_(True), "z": 1 + 2j, "v": np.arange(2)})
    assert json.loads(r.model_dump_json())["params"] == {"n": 3, "flag": True, "z": [1.0, 2.0], "v": [0, 1]}


def test_unknown_family_falls_back_to_plumbing():
    assert anchor_for("something_else[x=1]") == "plumbing"
    assert anchor_for("fact_iii[d=2,kappa=1]") == "Q_kappa V+ = W0"


def test_flatten_model_uses_dot_keys():
    flat = flatten_model(RunConfig())
    assert flat["model.kappas"] == [1.0]
    assert flat["tolerances.phase"] == 1e-10
