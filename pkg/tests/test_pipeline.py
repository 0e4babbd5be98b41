"""Tests for sweeps, figure tables and result export."""

import io

import pytest

from rf_fso_secrecy.data import FIGURES, PRESETS, figure_curves, preset_values
from rf_fso_secrecy.models import Method, Metric, MetricResult, ResultRow
from rf_fso_secrecy.pipeline import ResultExporter, SweepRunner, reproduce_figure, with_sweep_value
from rf_fso_secrecy.pipeline.sweep import build_row, figure_scenario_text, routes_agree
from rf_fso_secrecy.safety import ValidationError
from rf_fso_secrecy.secrecy import sop_lower
from rf_fso_secrecy.storage import build_scenario_file, parse_scenario_text, read_json, read_text


def _result(value, error, method=Method.QUADRATURE):
    return MetricResult(metric=Metric.SOP, value=value, method=method, error_estimate=error)


def test_with_sweep_value_updates_one_link(scenario):
    main = with_sweep_value(scenario, "rf_main.omega_db", 20.0)
    assert main.main_rf.omega == pytest.approx(100.0)
    assert main.eve_rf == scenario.eve_rf
    eve = with_sweep_value(scenario, "rf_eve.omega_db", -10.0)
    assert eve.eve_rf.omega == pytest.approx(0.1)
    fso = with_sweep_value(scenario, "fso.u_r_db", 30.0)
    assert fso.fso.u_r == pytest.approx(1000.0)
    assert fso.fso.g_d == scenario.fso.g_d


def test_with_sweep_value_rejects_other_keys(scenario):
    with pytest.raises(ValidationError):
        with_sweep_value(scenario, "fso.alpha_d", 3.0)


def test_routes_agree_uses_summed_errors():
    a = _result(0.20, 0.01, Method.CLOSED_FORM)
    b = _result(0.215, 0.01)
    c = _result(0.25, 0.001, Method.MONTE_CARLO)
    assert routes_agree([a, b])
    assert not routes_agree([a, b, c])
    assert routes_agree([c])


def test_build_row_fills_requested_routes():
    row = build_row(
        5.0,
        Metric.SOP,
        {Method.QUADRATURE: _result(0.3, 1e-9), Method.MONTE_CARLO: _result(0.3001, 4e-4, Method.MONTE_CARLO)},
    )
    assert row.value_closed is None and row.err_closed is None
    assert row.value_quad == 0.3
    assert row.mc_ci == 4e-4
    assert row.agreement_flag


def test_figure_tables():
    assert sorted(FIGURES) == list(range(2, 14))
    assert len(figure_curves(2)) == 6
    assert len(figure_curves(5)) == 4
    assert len(figure_curves(12)) == 3
    assert [label for label, _ in figure_curves(13)] == list(PRESETS)
    for fig_id, figure in FIGURES.items():
        assert figure["metric"] in ("asc", "sop", "pnsc")
        labels = [label for label, _ in figure_curves(fig_id)]
        assert len(labels) == len(set(labels))


@pytest.mark.parametrize("fig_id", sorted(FIGURES))
def test_figure_curves_build_valid_scenarios(fig_id):
    sweep_key = FIGURES[fig_id]["sweep_key"]
    for _, values in figure_curves(fig_id):
        parsed = build_scenario_file(parse_scenario_text(figure_scenario_text(values, sweep_key, 3)))
        assert parsed.sweep.values_db() == [0.0, 20.0, 40.0]


def test_preset_values_share_the_sweep_setting():
    values = preset_values("weibull-lognormal")
    assert values["rf_main.alpha"] == values["rf_eve.alpha"] == 4.0
    assert values["fso.alpha_d"] == 8.0
    assert values["rs_bits"] == 0.1


def test_sweep_runner_keeps_sweep_order(scenario_text):
    scenario_file = build_scenario_file(parse_scenario_text(scenario_text))
    runner = SweepRunner(metrics=[Metric.SOP, Metric.PNSC], methods=[Method.QUADRATURE], workers=2)
    rows = runner.run(scenario_file)
    assert [(row.sweep_value_db, row.metric) for row in rows] == [
        (0.0, Metric.SOP),
        (0.0, Metric.PNSC),
        (10.0, Metric.SOP),
        (10.0, Metric.PNSC),
    ]
    assert rows[0].value_quad > rows[2].value_quad
    assert rows[1].value_quad < rows[3].value_quad


def test_sweep_runner_without_sweep_uses_main_snr(scenario_text):
    text = "\n".join(line for line in scenario_text.splitlines() if not line.startswith("sweep."))
    rows = SweepRunner(metrics=[Metric.ASC], methods=[Method.QUADRATURE], workers=1).run(
        build_scenario_file(parse_scenario_text(text))
    )
    assert len(rows) == 1
    assert rows[0].sweep_value_db == pytest.approx(10.0)


def test_sweep_runner_reports_bits(scenario_text):
    scenario_file = build_scenario_file(parse_scenario_text(scenario_text))
    nats = SweepRunner(metrics=[Metric.ASC], methods=[Method.QUADRATURE], workers=1).run(scenario_file)
    bits = SweepRunner(metrics=[Metric.ASC], methods=[Method.QUADRATURE], workers=1, bits=True).run(
        scenario_file
    )
    assert bits[0].value_quad > nats[0].value_quad


def test_sweep_runner_requires_metrics_and_methods():
    with pytest.raises(ValidationError):
        SweepRunner(metrics=[], methods=[Method.QUADRATURE])


def test_stream_csv_writes_rows():
    buffer = io.StringIO()
    ResultExporter.stream_csv([ResultRow(sweep_value_db=1.0, metric=Metric.PNSC, value_quad=0.9)], buffer)
    assert buffer.getvalue().splitlines()[1].startswith("1.0,pnsc,")


def test_reproduce_figure_writes_curves_and_manifest(tmp_path):
    manifest = reproduce_figure(12, tmp_path, methods=[Method.QUADRATURE], points=2)
    figure_dir = tmp_path / "fig12"
    assert manifest["figure"] == 12
    assert manifest["metric"] == "sop"
    assert [curve["label"] for curve in manifest["curves"]] == ["rs0.1", "rs0.5", "rs1"]
    for curve in manifest["curves"]:
        lines = read_text(figure_dir / f"{curve['label']}.csv").splitlines()
        assert len(lines) == 3
        assert curve["agreement"]
    saved = read_json(figure_dir / "manifest.json")
    assert saved["methods"] == ["quadrature"]
    assert saved["curves"][0]["parameters"]["rs_bits"] == 0.1


def test_reproduce_figure_rejects_unknown_id(tmp_path):
    with pytest.raises(ValidationError):
        reproduce_figure(14, tmp_path)


@pytest.mark.slow
def test_sop_floor_at_high_main_snr():
    # with a finite FSO SNR the outage saturates as the main link improves
    values = dict(figure_curves(10))["a4-mu1-omega_v5"]
    text = figure_scenario_text(values, "rf_main.omega_db", 2)
    s = build_scenario_file(parse_scenario_text(text)).scenario
    high = sop_lower(with_sweep_value(s, "rf_main.omega_db", 40.0)).value
    lower = sop_lower(with_sweep_value(s, "rf_main.omega_db", 30.0)).value
    assert high == pytest.approx(lower, rel=0.05)
    assert high > 0.01


@pytest.mark.parametrize("fig_id", [7, 8])
def test_turbulence_figures_cover_both_pointing_errors(fig_id):
    curves = figure_curves(fig_id)
    assert len(curves) == 12
    assert {values["fso.epsilon"] for _, values in curves} == {1.0, 6.7}
    assert {(values["fso.alpha_d"], values["fso.beta_d"]) for _, values in curves} == {
        (2.296, 2), (4.2, 3), (8.0, 4)
    }


def test_eavesdropper_fading_figure_uses_severe_pointing_error():
    for _, values in figure_curves(11):
        assert values["fso.epsilon"] == 1.0
        assert values["fso.u_r_db"] == 15.0
