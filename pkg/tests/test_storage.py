"""Tests for scenario files and result storage."""

import math

import pytest

from rf_fso_secrecy.models import Detection, Metric, ResultRow
from rf_fso_secrecy.safety import ScenarioParseError, ValidationError
from rf_fso_secrecy.storage import (
    RESULT_COLUMNS,
    build_scenario_file,
    format_csv,
    format_scenario,
    load_scenario,
    parse_scenario_text,
    read_json,
    read_text,
    write_json,
    write_text,
)


def _replace(text, key, value):
    lines = [f"{key} = {value}" if line.startswith(f"{key} ") else line for line in text.splitlines()]
    return "\n".join(lines) + "\n"


def _drop(text, key):
    lines = [line for line in text.splitlines() if not line.startswith(f"{key} ")]
    return "\n".join(lines) + "\n"


def test_parse_scenario_text(scenario_text):
    parsed = build_scenario_file(parse_scenario_text(scenario_text))
    s = parsed.scenario
    assert s.main_rf.omega == pytest.approx(10.0)
    assert s.eve_rf.omega == pytest.approx(1.0)
    assert s.fso.alpha_d == 8.0
    assert s.fso.beta_d == 4
    assert s.fso.detection is Detection.HD
    assert s.fso.u_r == pytest.approx(10.0)
    assert s.rate_rs == 0.1
    assert parsed.sweep.key == "rf_main.omega_db"
    assert parsed.sweep.values_db() == [0.0, 10.0]
    assert parsed.mc_seed is None


def test_comments_and_blank_lines_are_ignored():
    values = parse_scenario_text("# header\n\n  rs_bits = 0.5  \n")
    assert values == {"rs_bits": "0.5"}


def test_unknown_key_reports_line_and_key():
    with pytest.raises(ScenarioParseError) as info:
        parse_scenario_text("rs_bits = 0.1\n# comment\nfso.gamma = 3\n")
    assert info.value.line == 3
    assert info.value.key == "fso.gamma"
    assert str(info.value) == "line 3: unknown key 'fso.gamma'"


def test_duplicate_key_is_rejected():
    with pytest.raises(ScenarioParseError, match="duplicate key 'rs_bits'"):
        parse_scenario_text("rs_bits = 0.1\nrs_bits = 0.2\n")


def test_line_without_separator_is_rejected():
    with pytest.raises(ScenarioParseError) as info:
        parse_scenario_text("rs_bits 0.1\n")
    assert info.value.line == 1


def test_direct_and_constituent_fso_keys_conflict(scenario_text):
    text = scenario_text + "fso.rho = 0.5\n"
    with pytest.raises(ScenarioParseError, match="not both"):
        build_scenario_file(parse_scenario_text(text))


def test_constituent_fso_keys():
    text = _drop(_drop(SCENARIO_BASE, "fso.g_d"), "fso.omega_cap_d")
    text += "fso.omega = 1.0\nfso.b0 = 0.5\nfso.rho = 0.5\n"
    fso = build_scenario_file(parse_scenario_text(text)).scenario.fso
    # g_d = 2 b0 (1 - rho), Omega' = omega + 2 b0 rho + 2 sqrt(2 b0 rho omega)
    assert fso.g_d == pytest.approx(0.5)
    assert fso.omega_cap_d == pytest.approx(1.5 + 2.0 * math.sqrt(0.5))


def test_incomplete_sweep_is_rejected(scenario_text):
    text = _drop(scenario_text, "sweep.points")
    with pytest.raises(ScenarioParseError, match="sweep.points"):
        build_scenario_file(parse_scenario_text(text))


def test_unsweepable_key_is_rejected(scenario_text):
    text = _replace(scenario_text, "sweep.key", "fso.alpha_d")
    with pytest.raises(ScenarioParseError, match="sweep.key"):
        build_scenario_file(parse_scenario_text(text))


def test_bad_detection_is_rejected(scenario_text):
    text = _replace(scenario_text, "fso.detection", "coherent")
    with pytest.raises(ScenarioParseError, match="hd or imdd"):
        build_scenario_file(parse_scenario_text(text))


def test_missing_required_key_is_rejected(scenario_text):
    with pytest.raises(ScenarioParseError, match="rf_eve.mu"):
        build_scenario_file(parse_scenario_text(_drop(scenario_text, "rf_eve.mu")))


@pytest.mark.parametrize(
    "key,value",
    [("fso.beta_d", "2.5"), ("rf_main.alpha", "abc"), ("rf_main.omega_db", "inf")],
)
def test_malformed_numbers_are_rejected(scenario_text, key, value):
    with pytest.raises(ScenarioParseError):
        build_scenario_file(parse_scenario_text(_replace(scenario_text, key, value)))


def test_model_validation_becomes_parse_error(scenario_text):
    text = _replace(scenario_text, "rf_main.eta", "1")
    with pytest.raises(ScenarioParseError, match="invalid scenario"):
        build_scenario_file(parse_scenario_text(text))


def test_format_then_parse_keeps_values(scenario_text):
    values = parse_scenario_text(scenario_text)
    text = format_scenario(values, header=["round trip"])
    assert text.startswith("# round trip\n")
    assert parse_scenario_text(text) == values


def test_format_scenario_rejects_unknown_keys():
    with pytest.raises(ValidationError):
        format_scenario({"fso.gamma": 1.0})


def test_load_scenario_from_file(tmp_path, scenario_text):
    path = tmp_path / "scenario.txt"
    write_text(scenario_text, path)
    assert load_scenario(path).scenario.rate_rs == 0.1


def test_csv_layout():
    rows = [
        ResultRow(sweep_value_db=0.0, metric=Metric.SOP, value_quad=0.25, err_quad=1e-9),
        ResultRow(
            sweep_value_db=5.0,
            metric=Metric.ASC,
            value_quad=1.5,
            err_quad=2e-9,
            value_mc=1.49,
            mc_ci=0.01,
            agreement_flag=False,
        ),
    ]
    text = format_csv(rows)
    assert "\r" not in text
    lines = text.split("\n")
    assert lines[0] == ",".join(RESULT_COLUMNS)
    assert lines[0].startswith("sweep_value_db,metric,value_closed,err_closed")
    assert lines[1] == "0.0,sop,,,0.25,1e-09,,,true"
    assert lines[2] == "5.0,asc,,,1.5,2e-09,1.49,0.01,false"
    assert lines[3] == ""


def test_json_round_trip(tmp_path):
    path = tmp_path / "nested" / "manifest.json"
    write_json({"figure": 2, "curves": [{"label": "strong"}]}, path)
    assert read_json(path) == {"figure": 2, "curves": [{"label": "strong"}]}


def test_write_text_uses_lf(tmp_path):
    path = tmp_path / "out.csv"
    write_text("a\nb\n", path)
    assert path.read_bytes() == b"a\nb\n"
    assert read_text(path) == "a\nb\n"


SCENARIO_BASE = """\
rf_main.alpha = 2
rf_main.eta = 1.0001
rf_main.mu = 1
rf_main.omega_db = 10
rf_eve.alpha = 2
rf_eve.eta = 1.0001
rf_eve.mu = 1
rf_eve.omega_db = 0
fso.alpha_d = 2.296
fso.beta_d = 2
fso.g_d = 2
fso.omega_cap_d = 2
fso.epsilon = 6.7
fso.u_r_db = 10
"""
